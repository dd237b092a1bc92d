"""Overlay rasterization: midpoint circles and lines, 1 px pure red."""

from __future__ import annotations

import math

import numpy as np

from .features import InterestPoint
from .geometry import Homography, project_point
from .image import RasterImage, iround

RED = (255, 0, 0)


def _plot(pixels: np.ndarray, x: int, y: int, color) -> None:
    if 0 <= x < pixels.shape[1] and 0 <= y < pixels.shape[0]:
        pixels[y, x] = color


def draw_circle(pixels: np.ndarray, cx: int, cy: int, radius: int, color=RED) -> None:
    """Midpoint circle; radius 0 plots the center pixel."""
    if radius <= 0:
        _plot(pixels, cx, cy, color)
        return
    x, y = radius, 0
    err = 1 - radius
    while x >= y:
        for dx, dy in ((x, y), (y, x), (-y, x), (-x, y), (-x, -y), (-y, -x), (y, -x), (x, -y)):
            _plot(pixels, cx + dx, cy + dy, color)
        y += 1
        if err < 0:
            err += 2 * y + 1
        else:
            x -= 1
            err += 2 * (y - x) + 1


def draw_line(pixels: np.ndarray, x0: int, y0: int, x1: int, y1: int, color=RED) -> None:
    """Bresenham line, endpoints inclusive, clipped per pixel."""
    dx = abs(x1 - x0)
    dy = -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    x, y = x0, y0
    while True:
        _plot(pixels, x, y, color)
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x += sx
        if e2 <= dx:
            err += dx
            y += sy


def keypoint_overlay(img: RasterImage, points: list[InterestPoint]) -> RasterImage:
    """Copy of the image with a red circle (radius 2.5 x scale) and an
    orientation tick at every keypoint."""
    pixels = img.pixels.copy()
    for p in points:
        cx, cy = iround(p.x), iround(p.y)
        r = max(1, iround(2.5 * p.scale))
        draw_circle(pixels, cx, cy, r)
        tx = iround(p.x + r * math.cos(p.orientation))
        ty = iround(p.y + r * math.sin(p.orientation))
        draw_line(pixels, cx, cy, tx, ty)
    return RasterImage(pixels)


def recognition_overlay(
    img: RasterImage,
    inlier_points: list[InterestPoint],
    hom: Homography,
    object_size: tuple[int, int],
) -> RasterImage:
    """Inlier keypoints plus the indexed object's frame: its corners
    projected through the homography, drawn as a quadrilateral."""
    pixels = img.pixels.copy()
    for p in inlier_points:
        draw_circle(pixels, iround(p.x), iround(p.y), max(1, iround(2.5 * p.scale)))
    w, h = object_size
    corners = [(0.0, 0.0), (w - 1.0, 0.0), (w - 1.0, h - 1.0), (0.0, h - 1.0)]
    projected = [project_point(hom, c) for c in corners]
    for k in range(4):
        x0, y0 = projected[k]
        x1, y1 = projected[(k + 1) % 4]
        draw_line(pixels, iround(x0), iround(y0), iround(x1), iround(y1))
    return RasterImage(pixels)
