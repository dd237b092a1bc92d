"""Fast-Hessian interest points and Haar-wavelet descriptors.

The extraction chain: grayscale -> integral image -> Hessian-determinant
response maps over a scale-space -> 3x3x3 non-maximum suppression with one
quadratic refinement step -> orientation assignment -> 64-component
descriptors.  All stages are pure functions; identical input and
configuration give byte-identical output.

Box-filter layout (center (x, y), odd filter size L, lobe l = L//3,
border b = (L-1)//2, half-lobe m = (l-1)//2; rectangles inclusive):

  Dxx = box(x-b, y-l+1, x+b, y+l-1) - 3*box(x-m, y-l+1, x+m, y+l-1)
  Dyy = box(x-l+1, y-b, x+l-1, y+b) - 3*box(x-l+1, y-m, x+l-1, y+m)
  Dxy = box(x+1, y-l, x+l, y-1) + box(x-l, y+1, x-1, y+l)
      - box(x-l, y-l, x-1, y-1) - box(x+1, y+1, x+l, y+l)

Each D is normalized by L^2.  Grid cells whose filter support (reach b from
the center) is not fully inside the image have response 0 and Laplacian
sign +1; interior cells never need clipping by construction.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ImageTooSmall
from .image import (
    GrayImage,
    IntegralImage,
    RasterImage,
    box_level_sums,
    build_integral,
    iround,
    to_grayscale,
)

FILTER_BASE = 9  # smallest filter; also the minimum image side
SIGMA_BASE = 1.2  # sigma of the 9x9 filter


def filter_sizes(octave: int, intervals: int) -> list[int]:
    """Filter sizes for a 1-based octave: start 3*2^o+3, step 6*2^(o-1).

    Octave 1: 9, 15, 21, 27; octave 2: 15, 27, 39, 51; octave 3: 27, 51, 75, 99.
    """
    start = 3 * (1 << octave) + 3
    step = 6 * (1 << (octave - 1))
    return [start + k * step for k in range(intervals)]


@dataclass
class ExtractionConfig:
    """All numeric knobs of the extraction chain, echoed into output JSON.

    Scale-relative parameters (suffix meaning: multiples of the interest
    point's sigma) are fixed defaults recorded here for reproducibility.
    """

    octaves: int = 3
    intervals: int = 4
    threshold: float = 4e-4
    upright: bool = False
    dxy_weight: float = 0.9
    orientation_radius: float = 6.0
    orientation_haar: float = 4.0
    orientation_sigma: float = 2.5
    orientation_window: float = math.pi / 3
    orientation_step: float = math.pi / 32
    descriptor_window: float = 20.0
    descriptor_grid: int = 4
    descriptor_samples: int = 5
    descriptor_haar: float = 2.0
    descriptor_sigma: float = 3.3

    def __post_init__(self):
        if not 1 <= self.octaves <= 4:
            raise ValueError(f"octaves must be in [1, 4], got {self.octaves}")
        if self.intervals < 3:
            raise ValueError(f"need >= 3 intervals per octave, got {self.intervals}")
        if self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExtractionConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in d.items() if k in known})


@dataclass(eq=False)
class ResponseMap:
    """Normalized Hessian-determinant responses on one (octave, interval) grid.

    Grid cell (i, j) sits at pixel (j*stride, i*stride); grid dims are
    ceil(width/stride) x ceil(height/stride).  laplacian_signs holds the
    sign of Dxx+Dyy (+1 on exact zero).
    """

    octave: int
    interval: int
    filter_size: int
    scale_sigma: float
    stride: int
    responses: np.ndarray
    laplacian_signs: np.ndarray


@dataclass(frozen=True)
class InterestPoint:
    """Scale-space extremum: sub-pixel position, sigma, strength, sign, angle."""

    x: float
    y: float
    scale: float
    response: float
    laplacian_sign: int
    orientation: float = 0.0


@dataclass(frozen=True, eq=False)
class Descriptor:
    """64-component unit-norm feature vector (all-zero for flat patches)."""

    components: np.ndarray
    laplacian_sign: int


def build_response_maps(ii: IntegralImage, config: Optional[ExtractionConfig] = None) -> list[ResponseMap]:
    """One response map per (octave, interval), octave-major order."""
    config = config or ExtractionConfig()
    if ii.width < FILTER_BASE or ii.height < FILTER_BASE:
        raise ImageTooSmall(
            f"image {ii.width}x{ii.height} below {FILTER_BASE}x{FILTER_BASE} minimum"
        )
    maps = []
    for octave in range(1, config.octaves + 1):
        stride = 1 << (octave - 1)
        xs = np.arange(0, ii.width, stride, dtype=np.int64)
        ys = np.arange(0, ii.height, stride, dtype=np.int64)
        gx, gy = np.meshgrid(xs, ys)
        for interval, size in enumerate(filter_sizes(octave, config.intervals), start=1):
            resp, signs = _hessian_grid(ii, gx, gy, size, config.dxy_weight)
            maps.append(
                ResponseMap(
                    octave=octave,
                    interval=interval,
                    filter_size=size,
                    scale_sigma=SIGMA_BASE * size / FILTER_BASE,
                    stride=stride,
                    responses=resp,
                    laplacian_signs=signs,
                )
            )
    return maps


def _hessian_grid(ii: IntegralImage, gx: np.ndarray, gy: np.ndarray, size: int, dxy_weight: float):
    lobe = size // 3
    border = (size - 1) // 2
    half = (lobe - 1) // 2
    inside = (
        (gx >= border)
        & (gx <= ii.width - 1 - border)
        & (gy >= border)
        & (gy <= ii.height - 1 - border)
    )
    # Integer-domain combinations: flat regions cancel to exactly zero.
    dxx = box_level_sums(ii, gx - border, gy - lobe + 1, gx + border, gy + lobe - 1) - 3 * box_level_sums(
        ii, gx - half, gy - lobe + 1, gx + half, gy + lobe - 1
    )
    dyy = box_level_sums(ii, gx - lobe + 1, gy - border, gx + lobe - 1, gy + border) - 3 * box_level_sums(
        ii, gx - lobe + 1, gy - half, gx + lobe - 1, gy + half
    )
    dxy = (
        box_level_sums(ii, gx + 1, gy - lobe, gx + lobe, gy - 1)
        + box_level_sums(ii, gx - lobe, gy + 1, gx - 1, gy + lobe)
        - box_level_sums(ii, gx - lobe, gy - lobe, gx - 1, gy - 1)
        - box_level_sums(ii, gx + 1, gy + 1, gx + lobe, gy + lobe)
    )
    inv_area = 1.0 / (255.0 * size * size)
    dxx = dxx * inv_area
    dyy = dyy * inv_area
    dxy = dxy * inv_area
    responses = np.where(inside, dxx * dyy - (dxy_weight * dxy) ** 2, 0.0)
    signs = np.where(inside & (dxx + dyy < 0), -1, 1).astype(np.int8)
    return responses, signs


def detect_interest_points(maps: list[ResponseMap], threshold: float) -> list[InterestPoint]:
    """Strict 3x3x3 maxima above threshold, refined by one quadratic step.

    First/last interval of each octave serve only as comparison layers.
    Points whose refinement offset exceeds 0.5 in any component (or whose
    local Hessian is singular) are discarded.  Output sorted by descending
    response, ties by (y, x, scale) ascending.
    """
    by_octave: dict[int, list[ResponseMap]] = {}
    for m in maps:
        by_octave.setdefault(m.octave, []).append(m)
    points: list[InterestPoint] = []
    for octave_maps in by_octave.values():
        octave_maps.sort(key=lambda m: m.interval)
        if len(octave_maps) < 3:
            raise ValueError("need >= 3 intervals per octave for detection")
        stack = np.stack([m.responses for m in octave_maps])
        n, gh, gw = stack.shape
        if gh < 3 or gw < 3:
            continue
        stride = octave_maps[0].stride
        for k in range(1, n - 1):
            core = stack[k, 1:-1, 1:-1]
            mask = core > threshold
            if not mask.any():
                continue
            for dk in (-1, 0, 1):
                layer = stack[k + dk]
                for di in (-1, 0, 1):
                    for dj in (-1, 0, 1):
                        if dk == 0 and di == 0 and dj == 0:
                            continue
                        mask &= core > layer[1 + di : gh - 1 + di, 1 + dj : gw - 1 + dj]
            step = octave_maps[k + 1].filter_size - octave_maps[k].filter_size
            for i, j in np.argwhere(mask) + 1:
                pt = _refine(stack, octave_maps, k, int(i), int(j), stride, step)
                if pt is not None:
                    points.append(pt)
    points.sort(key=lambda p: (-p.response, p.y, p.x, p.scale))
    return points


def _refine(stack, octave_maps, k, i, j, stride, step) -> Optional[InterestPoint]:
    c = stack[k - 1 : k + 2, i - 1 : i + 2, j - 1 : j + 2]
    dx = (c[1, 1, 2] - c[1, 1, 0]) / 2.0
    dy = (c[1, 2, 1] - c[1, 0, 1]) / 2.0
    ds = (c[2, 1, 1] - c[0, 1, 1]) / 2.0
    v = c[1, 1, 1]
    dxx = c[1, 1, 2] - 2 * v + c[1, 1, 0]
    dyy = c[1, 2, 1] - 2 * v + c[1, 0, 1]
    dss = c[2, 1, 1] - 2 * v + c[0, 1, 1]
    dxy = (c[1, 2, 2] - c[1, 2, 0] - c[1, 0, 2] + c[1, 0, 0]) / 4.0
    dxs = (c[2, 1, 2] - c[2, 1, 0] - c[0, 1, 2] + c[0, 1, 0]) / 4.0
    dys = (c[2, 2, 1] - c[2, 0, 1] - c[0, 2, 1] + c[0, 0, 1]) / 4.0
    hess = np.array([[dxx, dxy, dxs], [dxy, dyy, dys], [dxs, dys, dss]])
    grad = np.array([dx, dy, ds])
    try:
        offset = -np.linalg.solve(hess, grad)
    except np.linalg.LinAlgError:
        return None
    if np.max(np.abs(offset)) > 0.5:
        return None
    size = octave_maps[k].filter_size + offset[2] * step
    return InterestPoint(
        x=float((j + offset[0]) * stride),
        y=float((i + offset[1]) * stride),
        scale=float(SIGMA_BASE * size / FILTER_BASE),
        response=float(v),
        laplacian_sign=int(octave_maps[k].laplacian_signs[i, j]),
    )


def _haar_x(ii: IntegralImage, xs, ys, size: int) -> np.ndarray:
    """Right-minus-left box difference: positive for luminance increasing in +x."""
    half = size // 2
    right = box_level_sums(ii, xs, ys - half, xs + half - 1, ys + half - 1)
    left = box_level_sums(ii, xs - half, ys - half, xs - 1, ys + half - 1)
    return (right - left) / 255.0


def _haar_y(ii: IntegralImage, xs, ys, size: int) -> np.ndarray:
    """Bottom-minus-top box difference: positive for luminance increasing in +y."""
    half = size // 2
    lower = box_level_sums(ii, xs - half, ys, xs + half - 1, ys + half - 1)
    upper = box_level_sums(ii, xs - half, ys - half, xs + half - 1, ys - 1)
    return (lower - upper) / 255.0


def _even_size(target: float) -> int:
    """Nearest even box size to `target`, at least 2."""
    return 2 * max(1, iround(target / 2.0))


def assign_orientation(ii: IntegralImage, ip: InterestPoint, config: Optional[ExtractionConfig] = None) -> InterestPoint:
    """Dominant Haar-gradient direction over a pi/3 sliding window.

    Haar responses (size ~4s) are sampled on a radius-6s disc at step s and
    Gaussian-weighted (sigma 2.5s); the window slides by pi/32 and the
    orientation is the angle of the largest summed response vector.  Zero
    total response gives orientation 0.
    """
    config = config or ExtractionConfig()
    s = ip.scale
    radius = int(config.orientation_radius)
    size = _even_size(config.orientation_haar * s)
    grid = np.arange(-radius, radius + 1)
    ui, vi = np.meshgrid(grid, grid)
    disc = ui * ui + vi * vi <= radius * radius
    ui = ui[disc]
    vi = vi[disc]
    px = np.floor(ip.x + ui * s + 0.5).astype(np.int64)
    py = np.floor(ip.y + vi * s + 0.5).astype(np.int64)
    weight = np.exp(-(ui * ui + vi * vi) / (2.0 * config.orientation_sigma**2))
    gx = weight * _haar_x(ii, px, py, size)
    gy = weight * _haar_y(ii, px, py, size)
    angles = np.mod(np.arctan2(gy, gx), 2.0 * math.pi)
    starts = np.arange(0.0, 2.0 * math.pi, config.orientation_step)
    in_window = np.mod(angles[None, :] - starts[:, None], 2.0 * math.pi) < config.orientation_window
    sum_x = in_window @ gx
    sum_y = in_window @ gy
    mag2 = sum_x * sum_x + sum_y * sum_y
    best = int(np.argmax(mag2))
    if mag2[best] == 0.0:
        return dataclasses.replace(ip, orientation=0.0)
    theta = math.atan2(sum_y[best], sum_x[best]) % (2.0 * math.pi)
    return dataclasses.replace(ip, orientation=theta)


def extract_descriptor(
    ii: IntegralImage,
    ip: InterestPoint,
    upright: bool = False,
    config: Optional[ExtractionConfig] = None,
) -> Descriptor:
    """64-d descriptor: per-subregion (sum dx, sum dy, sum |dx|, sum |dy|).

    A 20s x 20s window aligned to the orientation (axis-aligned if upright)
    is sampled on a 20x20 grid (4x4 subregions of 5x5 samples) with Haar
    size ~2s and Gaussian weight sigma 3.3s; responses are rotated into the
    keypoint frame before accumulation.  The concatenated vector is
    L2-normalized; an all-zero vector stays all-zero.
    """
    config = config or ExtractionConfig()
    s = ip.scale
    theta = 0.0 if upright else ip.orientation
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    size = _even_size(config.descriptor_haar * s)
    n = config.descriptor_grid * config.descriptor_samples
    idx = np.arange(n) - (n - 1) / 2.0  # -9.5 .. 9.5 in units of s
    u, v = np.meshgrid(idx, idx)  # u along x (columns), v along y (rows)
    rx = (u * cos_t - v * sin_t) * s
    ry = (u * sin_t + v * cos_t) * s
    px = np.floor(ip.x + rx + 0.5).astype(np.int64)
    py = np.floor(ip.y + ry + 0.5).astype(np.int64)
    dx0 = _haar_x(ii, px, py, size)
    dy0 = _haar_y(ii, px, py, size)
    weight = np.exp(-(u * u + v * v) / (2.0 * config.descriptor_sigma**2))
    dx = weight * (dx0 * cos_t + dy0 * sin_t)
    dy = weight * (-dx0 * sin_t + dy0 * cos_t)
    g, m = config.descriptor_grid, config.descriptor_samples
    blocks_dx = dx.reshape(g, m, g, m)
    blocks_dy = dy.reshape(g, m, g, m)
    vec = np.stack(
        [
            blocks_dx.sum(axis=(1, 3)),
            blocks_dy.sum(axis=(1, 3)),
            np.abs(blocks_dx).sum(axis=(1, 3)),
            np.abs(blocks_dy).sum(axis=(1, 3)),
        ],
        axis=-1,
    ).ravel()
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec = vec / norm
    return Descriptor(components=vec, laplacian_sign=ip.laplacian_sign)


def extract_features(
    img: RasterImage, config: Optional[ExtractionConfig] = None
) -> tuple[list[InterestPoint], list[Descriptor]]:
    """Full chain: grayscale, integral, response maps, detection, orientation, descriptors.

    descriptors[i] corresponds to points[i].  With upright configuration the
    orientation stage is skipped (orientation stays 0).
    """
    config = config or ExtractionConfig()
    gray = to_grayscale(img)
    ii = build_integral(gray)
    maps = build_response_maps(ii, config)
    points = detect_interest_points(maps, config.threshold)
    if not config.upright:
        points = [assign_orientation(ii, p, config) for p in points]
    descriptors = [extract_descriptor(ii, p, config.upright, config) for p in points]
    return points, descriptors
