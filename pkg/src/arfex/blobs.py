"""Scanline blob detection: per-row foreground runs merged across rows.

Runs on adjacent rows whose column intervals share at least one column are
merged transitively (union-find), which is exactly 4-connected labeling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .image import GrayImage


@dataclass(frozen=True)
class LineBlob:
    """Maximal foreground run on one scanline, inclusive column span."""

    row: int
    x_start: int
    x_end: int
    label: int


@dataclass
class Blob:
    """Merged region: size, tight bounding box, centroid, member runs."""

    pixel_count: int
    bbox: tuple[int, int, int, int]  # (x_min, y_min, x_max, y_max)
    centroid: tuple[float, float]
    member_runs: list[LineBlob]


def binarize(gray: GrayImage, threshold: int, polarity: str = "white") -> np.ndarray:
    """Boolean foreground mask.

    White polarity: level >= threshold is foreground; black: level < threshold.
    """
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in [0, 255], got {threshold}")
    if polarity == "white":
        return gray.levels >= threshold
    if polarity == "black":
        return gray.levels < threshold
    raise ValueError(f"polarity must be 'white' or 'black', got {polarity!r}")


def detect_lineblobs(row, row_index: int = 0, first_label: int = 0) -> list[LineBlob]:
    """Maximal foreground runs of one mask row, left to right, freshly labeled."""
    v = np.asarray(row, dtype=bool).astype(np.int8)
    edges = np.diff(np.concatenate(([0], v, [0])))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return [
        LineBlob(row=row_index, x_start=int(s), x_end=int(e), label=first_label + k)
        for k, (s, e) in enumerate(zip(starts, ends))
    ]


def scan_lineblobs(mask: np.ndarray) -> list[LineBlob]:
    """Runs for every row of a mask, top to bottom, labels fresh across the image."""
    mask = np.asarray(mask, dtype=bool)
    runs: list[LineBlob] = []
    for r in range(mask.shape[0]):
        runs.extend(detect_lineblobs(mask[r], row_index=r, first_label=len(runs)))
    return runs


def merge_lineblobs(runs: list[LineBlob], min_pixels: int = 1) -> list[Blob]:
    """Union column-overlapping runs on adjacent rows into blobs.

    Scan order of `runs` does not matter (they are sorted internally), so a
    bottom-to-top scan produces the same partition.  Blobs smaller than
    min_pixels are dropped; output sorted by descending pixel count, ties by
    (y_min, x_min).
    """
    runs = sorted(runs, key=lambda r: (r.row, r.x_start))
    parent = list(range(len(runs)))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    row_start: dict[int, int] = {}
    for k, r in enumerate(runs):
        row_start.setdefault(r.row, k)
    for k, r in enumerate(runs):
        j = row_start.get(r.row + 1)
        if j is None:
            continue
        while j < len(runs) and runs[j].row == r.row + 1 and runs[j].x_start <= r.x_end:
            if runs[j].x_end >= r.x_start:
                union(k, j)
            j += 1

    groups: dict[int, list[LineBlob]] = {}
    for k, r in enumerate(runs):
        groups.setdefault(find(k), []).append(r)

    blobs = []
    for members in groups.values():
        count = sum(r.x_end - r.x_start + 1 for r in members)
        if count < min_pixels:
            continue
        x_min = min(r.x_start for r in members)
        x_max = max(r.x_end for r in members)
        y_min = min(r.row for r in members)
        y_max = max(r.row for r in members)
        cx = sum((r.x_end - r.x_start + 1) * (r.x_start + r.x_end) / 2.0 for r in members) / count
        cy = sum((r.x_end - r.x_start + 1) * r.row for r in members) / count
        blobs.append(
            Blob(
                pixel_count=count,
                bbox=(x_min, y_min, x_max, y_max),
                centroid=(cx, cy),
                member_runs=members,
            )
        )
    blobs.sort(key=lambda b: (-b.pixel_count, b.bbox[1], b.bbox[0]))
    return blobs


def detect_blobs(mask: np.ndarray, min_pixels: int = 1) -> list[Blob]:
    """Scan and merge in one call."""
    return merge_lineblobs(scan_lineblobs(mask), min_pixels=min_pixels)
