"""Grayscale conversion, integral images, and box sums against direct summation."""

import numpy as np
import pytest

from arfex.image import (
    GrayImage,
    IntegralImage,
    RasterImage,
    box_sum,
    box_sums,
    build_integral,
    to_grayscale,
)
from conftest import random_gray, random_raster
from oracles import naive_box_sum, slice_box_sum


def solid(r, g, b, w=4, h=4):
    px = np.zeros((h, w, 3), dtype=np.uint8)
    px[:] = (r, g, b)
    return RasterImage(px)


def test_grayscale_white_maps_to_max():
    assert to_grayscale(solid(255, 255, 255)).levels[0, 0] == 255


def test_grayscale_black_maps_to_zero():
    assert to_grayscale(solid(0, 0, 0)).levels[0, 0] == 0


def test_grayscale_pure_red():
    # round(0.299 * 255) = round(76.245) = 76
    assert to_grayscale(solid(255, 0, 0)).levels[0, 0] == 76


def test_grayscale_rounds_half_up():
    # 0.299*1 + 0.587*0 + 0.114*3 = 0.641 -> 1;  0.299*1 = 0.299 -> 0
    assert to_grayscale(solid(1, 0, 3)).levels[0, 0] == 1
    assert to_grayscale(solid(1, 0, 0)).levels[0, 0] == 0


def test_grayscale_idempotent_on_gray_input():
    values = np.arange(256, dtype=np.uint8).reshape(16, 16)
    img = RasterImage.from_gray(values)
    assert np.array_equal(to_grayscale(img).levels, values)


def test_grayscale_preserves_dimensions(rng):
    img = random_raster(rng, 7, 11)
    g = to_grayscale(img)
    assert (g.width, g.height) == (7, 11)


def test_unit_view_is_levels_over_255(rng):
    g = random_gray(rng, 9, 5)
    assert np.array_equal(g.unit, g.levels.astype(np.float64) / 255.0)


def test_integral_single_cell():
    g = GrayImage(np.array([[128]], dtype=np.uint8))
    ii = build_integral(g)
    assert ii.table[0, 0] == pytest.approx(128 / 255.0, abs=0)


def test_integral_all_ones_3x3():
    g = GrayImage(np.full((3, 3), 255, dtype=np.uint8))
    ii = build_integral(g)
    for y in range(3):
        for x in range(3):
            assert ii.table[y, x] == pytest.approx((x + 1) * (y + 1), abs=1e-12)


def test_integral_matches_double_loop_oracle(rng):
    g = random_gray(rng, 8, 8)
    ii = build_integral(g)
    for y in range(8):
        for x in range(8):
            assert ii.table[y, x] == pytest.approx(
                naive_box_sum(g.unit, 0, 0, x, y), abs=1e-9
            )


def test_integral_monotone_under_pixel_increase(rng):
    levels = rng.integers(0, 200, size=(6, 6), dtype=np.uint8)
    base = build_integral(GrayImage(levels)).table
    bumped = levels.copy()
    bumped[3, 2] += 50
    new = build_integral(GrayImage(bumped)).table
    assert np.all(new >= base - 1e-12)
    assert new[5, 5] > base[5, 5]


def test_box_sum_full_image_all_ones():
    g = GrayImage(np.full((4, 4), 255, dtype=np.uint8))
    ii = build_integral(g)
    assert box_sum(ii, 0, 0, 3, 3) == pytest.approx(16.0, abs=1e-12)


def test_box_sum_single_pixel(rng):
    g = random_gray(rng, 6, 6)
    ii = build_integral(g)
    assert box_sum(ii, 2, 3, 2, 3) == pytest.approx(g.unit[3, 2], abs=1e-12)


def test_box_sum_random_rects_match_oracle(rng):
    g = random_gray(rng, 16, 16)
    ii = build_integral(g)
    for _ in range(200):
        x0, x1 = sorted(rng.integers(0, 16, size=2))
        y0, y1 = sorted(rng.integers(0, 16, size=2))
        expected = naive_box_sum(g.unit, x0, y0, x1, y1)
        assert box_sum(ii, x0, y0, x1, y1) == pytest.approx(expected, abs=1e-9)


def test_box_sum_clips_out_of_bounds(rng):
    g = random_gray(rng, 10, 10)
    ii = build_integral(g)
    for rect in [(-3, -3, 4, 4), (5, 5, 30, 30), (-5, 2, 20, 7)]:
        assert box_sum(ii, *rect) == pytest.approx(slice_box_sum(g.unit, *rect), abs=1e-9)


def test_box_sum_empty_after_clipping_is_zero(rng):
    g = random_gray(rng, 10, 10)
    ii = build_integral(g)
    assert box_sum(ii, 12, 0, 20, 5) == 0.0
    assert box_sum(ii, 0, -7, 5, -2) == 0.0
    assert box_sum(ii, -4, -4, -1, -1) == 0.0


def test_box_sum_additivity_of_adjacent_rects(rng):
    g = random_gray(rng, 20, 20)
    ii = build_integral(g)
    for _ in range(100):
        x0, xm, x1 = sorted(rng.integers(0, 20, size=3))
        y0, y1 = sorted(rng.integers(0, 20, size=2))
        if xm == x1:
            continue
        whole = box_sum(ii, x0, y0, x1, y1)
        left = box_sum(ii, x0, y0, xm, y1)
        right = box_sum(ii, xm + 1, y0, x1, y1)
        assert whole == pytest.approx(left + right, abs=1e-9)


def test_box_sums_vectorized_matches_scalar(rng):
    g = random_gray(rng, 16, 12)
    ii = build_integral(g)
    x0 = rng.integers(-4, 16, size=50)
    y0 = rng.integers(-4, 12, size=50)
    x1 = x0 + rng.integers(0, 10, size=50)
    y1 = y0 + rng.integers(0, 10, size=50)
    vec = box_sums(ii, x0, y0, x1, y1)
    for k in range(50):
        assert vec[k] == pytest.approx(box_sum(ii, x0[k], y0[k], x1[k], y1[k]), abs=0)


def test_raster_rejects_bad_shapes():
    with pytest.raises(ValueError):
        RasterImage(np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(ValueError):
        GrayImage(np.zeros((0, 4), dtype=np.uint8))
