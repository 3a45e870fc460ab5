from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import example, given
from hypothesis import strategies as st

from guiag.errors import CoordinateRangeError, GeometryError
from guiag.geometry import (
  NormBox,
  NormPoint,
  PixelBox,
  PixelPoint,
  ScreenDims,
  box_center,
  box_from_json,
  denormalize_point,
  inflate_box,
  normalize_box,
  normalize_edge,
  normalize_point,
  point_from_json,
  point_in_box,
  unit_to_norm,
)

from tests.hypothesis_strategies import norm_boxes, norm_points, pixels_on, screen_dims


def _round_half_up(value: Fraction) -> int:
  floor = value.numerator // value.denominator
  return floor + (value - floor >= Fraction(1, 2))


def test_normalize_point_on_a_phone_screen() -> None:
  dims = ScreenDims(1080, 2400)

  assert normalize_point(PixelPoint(540, 1200), dims) == NormPoint(500, 500)
  assert normalize_point(PixelPoint(0, 0), dims) == NormPoint(0, 0)
  assert normalize_point(PixelPoint(1079, 2399), dims) == NormPoint(999, 1000)


def test_normalize_point_rounds_half_up() -> None:
  # 1 * 1000 / 8 = 125 exactly, 3 * 1000 / 16 = 187.5 rounds to 188
  assert normalize_point(PixelPoint(1, 3), ScreenDims(8, 16)) == NormPoint(125, 188)


def test_normalize_point_rejects_pixels_outside_the_screen() -> None:
  with pytest.raises(CoordinateRangeError) as excinfo:
    normalize_point(PixelPoint(1080, 10), ScreenDims(1080, 2400))

  assert excinfo.value.axis == "x"


def test_screen_edge_maps_to_the_grid_border() -> None:
  assert normalize_edge(1080, 2400, ScreenDims(1080, 2400)) == NormPoint(1000, 1000)
  with pytest.raises(CoordinateRangeError):
    normalize_edge(1081, 0, ScreenDims(1080, 2400))


def test_denormalize_clamps_to_last_pixel() -> None:
  dims = ScreenDims(1080, 2400)

  assert denormalize_point(NormPoint(1000, 1000), dims) == PixelPoint(1079, 2399)
  assert denormalize_point(NormPoint(500, 500), dims) == PixelPoint(540, 1200)


@pytest.mark.parametrize(
  ("x", "y"),
  [(-1, 0), (0, 1001), (1001, 1001)],
)
def test_norm_point_range_is_enforced(x: int, y: int) -> None:
  with pytest.raises(CoordinateRangeError):
    NormPoint(x, y)


def test_norm_point_rejects_floats_and_bools() -> None:
  with pytest.raises(GeometryError):
    NormPoint(1.5, 2)  # type: ignore[arg-type]
  with pytest.raises(GeometryError):
    NormPoint(True, 2)  # type: ignore[arg-type]


def test_box_corner_order_is_enforced() -> None:
  with pytest.raises(GeometryError, match="out of order"):
    NormBox(10, 10, 5, 20)
  assert NormBox(10, 10, 10, 10) == NormBox(10, 10, 10, 10)


def test_normalize_box_keeps_corner_order() -> None:
  box = normalize_box(PixelBox(108, 240, 540, 480), ScreenDims(1080, 2400))

  assert box == NormBox(100, 100, 500, 200)


def test_point_in_box_includes_edges() -> None:
  box = NormBox(100, 100, 200, 200)

  assert point_in_box(NormPoint(100, 200), box)
  assert not point_in_box(NormPoint(99, 150), box)


def test_inflate_box_is_clamped_to_grid() -> None:
  assert inflate_box(NormBox(5, 10, 995, 990), 20) == NormBox(0, 0, 1000, 1000)


def test_box_center_rounds_half_up() -> None:
  assert box_center(NormBox(0, 0, 1, 3)) == NormPoint(1, 2)


def test_unit_to_norm() -> None:
  assert unit_to_norm(0.5, "x") == 500
  assert unit_to_norm(1, "y") == 1000
  with pytest.raises(CoordinateRangeError):
    unit_to_norm(1.2, "x")
  with pytest.raises(GeometryError):
    unit_to_norm(float("nan"), "x")


def test_json_decoding_is_strict_about_keys() -> None:
  assert point_from_json({"x": 1, "y": 2}) == NormPoint(1, 2)
  with pytest.raises(GeometryError, match="unknown keys"):
    point_from_json({"x": 1, "y": 2, "z": 3})
  assert point_from_json({"x": 1, "y": 2, "z": 3}, strict=False) == NormPoint(1, 2)
  with pytest.raises(GeometryError, match="missing"):
    box_from_json({"x1": 1, "y1": 2, "x2": 3})


@given(screen_dims(), st.integers(0, 3999), st.integers(0, 3999))
@example(ScreenDims(1, 1), 0, 0)
@example(ScreenDims(8, 16), 1, 3)
def test_normalize_point_matches_exact_rational_rounding(dims: ScreenDims, x: int, y: int) -> None:
  pixel = PixelPoint(x % dims.width, y % dims.height)

  point = normalize_point(pixel, dims)

  assert point.x == _round_half_up(Fraction(pixel.x * 1000, dims.width))
  assert point.y == _round_half_up(Fraction(pixel.y * 1000, dims.height))
  assert 0 <= point.x <= 1000
  assert 0 <= point.y <= 1000


@given(screen_dims(max_side=1000), st.data())
def test_normalize_then_denormalize_is_identity_on_small_screens(dims: ScreenDims, data: st.DataObject) -> None:
  pixel = data.draw(pixels_on(dims))

  assert denormalize_point(normalize_point(pixel, dims), dims) == pixel


@given(norm_points(), norm_boxes())
def test_point_in_box_agrees_with_brute_force(point: NormPoint, box: NormBox) -> None:
  inside = point.x in range(box.x1, box.x2 + 1) and point.y in range(box.y1, box.y2 + 1)

  assert point_in_box(point, box) == inside


@given(norm_boxes())
def test_box_center_lies_inside_the_box(box: NormBox) -> None:
  assert point_in_box(box_center(box), box)


def _norm_oracle(pixel: int, side: int) -> int:
  return _round_half_up(Fraction(pixel * 1000, side))


def _pixel_oracle(norm: int, side: int) -> int:
  return min(side - 1, _round_half_up(Fraction(norm * side, 1000)))


@pytest.mark.parametrize("dims", [ScreenDims(1, 1), ScreenDims(3, 7), ScreenDims(100, 100)])
def test_every_pixel_of_small_screens_matches_the_rational_oracle(dims: ScreenDims) -> None:
  for x in range(dims.width):
    for y in range(dims.height):
      pixel = PixelPoint(x, y)

      point = normalize_point(pixel, dims)

      assert point == NormPoint(_norm_oracle(x, dims.width), _norm_oracle(y, dims.height))
      assert denormalize_point(point, dims) == pixel


@pytest.mark.parametrize("dims", [ScreenDims(1, 1), ScreenDims(3, 7), ScreenDims(100, 100), ScreenDims(1920, 1080)])
def test_every_grid_value_denormalizes_like_the_rational_oracle(dims: ScreenDims) -> None:
  for value in range(1001):
    pixel = denormalize_point(NormPoint(value, value), dims)

    assert pixel == PixelPoint(_pixel_oracle(value, dims.width), _pixel_oracle(value, dims.height))


def test_full_hd_axes_match_the_rational_oracle() -> None:
  dims = ScreenDims(1920, 1080)
  # axes are normalized independently
  pixels = [PixelPoint(x, 0) for x in range(dims.width)]
  pixels += [PixelPoint(0, y) for y in range(dims.height)]
  pixels += [PixelPoint(x, x * dims.height // dims.width) for x in range(0, dims.width, 7)]

  for pixel in pixels:
    point = normalize_point(pixel, dims)

    assert point == NormPoint(_norm_oracle(pixel.x, dims.width), _norm_oracle(pixel.y, dims.height))
    assert abs(denormalize_point(point, dims).x - pixel.x) <= 2
    assert abs(denormalize_point(point, dims).y - pixel.y) <= 2


@given(screen_dims(max_side=4096), st.data())
def test_round_trip_error_is_bounded_by_pixels_per_grid_unit(dims: ScreenDims, data: st.DataObject) -> None:
  pixel = data.draw(pixels_on(dims))

  back = denormalize_point(normalize_point(pixel, dims), dims)

  assert abs(back.x - pixel.x) <= math.ceil(dims.width / 1000)
  assert abs(back.y - pixel.y) <= math.ceil(dims.height / 1000)


@given(screen_dims(max_side=4096), st.data())
def test_normalization_is_monotonic(dims: ScreenDims, data: st.DataObject) -> None:
  a, b = sorted((data.draw(st.integers(0, dims.width - 1)), data.draw(st.integers(0, dims.width - 1))))
  c, d = sorted((data.draw(st.integers(0, 1000)), data.draw(st.integers(0, 1000))))

  assert normalize_point(PixelPoint(a, 0), dims).x <= normalize_point(PixelPoint(b, 0), dims).x
  assert denormalize_point(NormPoint(c, 0), dims).x <= denormalize_point(NormPoint(d, 0), dims).x


@given(screen_dims(max_side=4096), st.data())
def test_normalization_preserves_containment(dims: ScreenDims, data: st.DataObject) -> None:
  x1, x, x2 = sorted(data.draw(st.integers(0, dims.width - 1)) for _ in range(3))
  y1, y, y2 = sorted(data.draw(st.integers(0, dims.height - 1)) for _ in range(3))

  box = normalize_box(PixelBox(x1, y1, x2, y2), dims)
  point = normalize_point(PixelPoint(x, y), dims)

  assert point_in_box(point, box)
  assert point_in_box(point, inflate_box(box, 1))


@pytest.mark.parametrize("width", [1001, 1999, 2000, 2001, 4096])
def test_round_trip_error_bound_holds_for_every_pixel_of_wide_screens(width: int) -> None:
  dims = ScreenDims(width, 1)
  bound = math.ceil(width / 1000)

  errors = [abs(denormalize_point(normalize_point(PixelPoint(x, 0), dims), dims).x - x) for x in range(width)]

  assert max(errors) <= bound
