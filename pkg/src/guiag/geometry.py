"""Pixel and normalized screen coordinates.

Normalized coordinates live on an integer grid from 0 to 1000 on both axes. The origin is the
top-left corner of the screen, x grows rightwards and y grows downwards. All conversions use
round-half-up on exact integer arithmetic, so results never depend on float representation.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from guiag.errors import CoordinateRangeError, GeometryError

SCALE = 1000

POINT_KEYS = ("x", "y")
BOX_KEYS = ("x1", "y1", "x2", "y2")


def round_half_up_div(numerator: int, denominator: int) -> int:
  """Return round_half_up(numerator / denominator) for non-negative integers."""
  return (2 * numerator + denominator) // (2 * denominator)


def _require_int(value: object, name: str) -> int:
  # bool is an int subclass but never a coordinate
  if isinstance(value, bool) or not isinstance(value, int):
    msg = f"{name} must be an integer, got {value!r}"
    raise GeometryError(msg)
  return value


def _require_norm(value: object, axis: str) -> int:
  value = _require_int(value, axis)
  if not 0 <= value <= SCALE:
    msg = f"{axis}={value} outside the normalized range [0, {SCALE}]"
    raise CoordinateRangeError(msg, axis)
  return value


@dataclass(frozen=True, slots=True)
class ScreenDims:
  """Raw screenshot dimensions in pixels."""

  width: int
  height: int

  def __post_init__(self) -> None:
    """Validate both dimensions."""
    for axis in ("width", "height"):
      value = _require_int(getattr(self, axis), axis)
      if value < 1:
        msg = f"{axis} must be at least 1, got {value}"
        raise GeometryError(msg)

  def as_dict(self) -> dict[str, int]:
    """Return the JSON encoding."""
    return {"width": self.width, "height": self.height}

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> ScreenDims:
    """Decode from the JSON encoding."""
    try:
      return cls(width=data["width"], height=data["height"])
    except (KeyError, TypeError) as err:
      msg = f"screen dims need 'width' and 'height', got {data!r}"
      raise GeometryError(msg) from err


@dataclass(frozen=True, slots=True)
class PixelPoint:
  """A pixel position on a concrete screenshot."""

  x: int
  y: int

  def __post_init__(self) -> None:
    """Validate pixel coordinates are non-negative integers."""
    for axis in POINT_KEYS:
      value = _require_int(getattr(self, axis), axis)
      if value < 0:
        msg = f"pixel {axis}={value} is negative"
        raise CoordinateRangeError(msg, axis)


@dataclass(frozen=True, slots=True)
class PixelBox:
  """Inclusive pixel rectangle."""

  x1: int
  y1: int
  x2: int
  y2: int

  def __post_init__(self) -> None:
    """Validate corners are non-negative integers."""
    for axis in BOX_KEYS:
      value = _require_int(getattr(self, axis), axis)
      if value < 0:
        msg = f"pixel {axis}={value} is negative"
        raise CoordinateRangeError(msg, axis)


@dataclass(frozen=True, slots=True)
class NormPoint:
  """A point on the normalized [0, 1000] grid."""

  x: int
  y: int

  def __post_init__(self) -> None:
    """Validate both coordinates."""
    _require_norm(self.x, "x")
    _require_norm(self.y, "y")

  def as_dict(self) -> dict[str, int]:
    """Return the JSON encoding ``{"x": x, "y": y}``."""
    return {"x": self.x, "y": self.y}


@dataclass(frozen=True, slots=True)
class NormBox:
  """A rectangle on the normalized [0, 1000] grid, edges inclusive. Zero-area boxes are legal."""

  x1: int
  y1: int
  x2: int
  y2: int

  def __post_init__(self) -> None:
    """Validate range and corner ordering."""
    for axis in BOX_KEYS:
      _require_norm(getattr(self, axis), axis)
    if self.x1 > self.x2 or self.y1 > self.y2:
      msg = f"box corners out of order: ({self.x1}, {self.y1})-({self.x2}, {self.y2})"
      raise GeometryError(msg)

  def as_dict(self) -> dict[str, int]:
    """Return the JSON encoding ``{"x1": .., "y1": .., "x2": .., "y2": ..}``."""
    return {"x1": self.x1, "y1": self.y1, "x2": self.x2, "y2": self.y2}


def _check_within(x: int, y: int, dims: ScreenDims) -> None:
  if not 0 <= x < dims.width:
    msg = f"pixel x={x} outside screen width {dims.width}"
    raise CoordinateRangeError(msg, "x")
  if not 0 <= y < dims.height:
    msg = f"pixel y={y} outside screen height {dims.height}"
    raise CoordinateRangeError(msg, "y")


def normalize_point(p: PixelPoint, dims: ScreenDims) -> NormPoint:
  """Map a pixel inside ``dims`` onto the normalized grid."""
  _check_within(p.x, p.y, dims)
  return NormPoint(
    x=round_half_up_div(p.x * SCALE, dims.width),
    y=round_half_up_div(p.y * SCALE, dims.height),
  )


def denormalize_point(p: NormPoint, dims: ScreenDims) -> PixelPoint:
  """Map a normalized point back to a pixel, clamped to the last addressable pixel."""
  return PixelPoint(
    x=min(dims.width - 1, round_half_up_div(p.x * dims.width, SCALE)),
    y=min(dims.height - 1, round_half_up_div(p.y * dims.height, SCALE)),
  )


def normalize_edge(x_edge: int, y_edge: int, dims: ScreenDims) -> NormPoint:
  """Map a geometric screen edge position (0..width, 0..height inclusive) onto the grid.

  This is the corner convention: the bottom-right corner of the screen, ``(width, height)``,
  maps to ``{"x": 1000, "y": 1000}``. Pixel centers use `normalize_point` instead.
  """
  x_edge = _require_int(x_edge, "x")
  y_edge = _require_int(y_edge, "y")
  if not 0 <= x_edge <= dims.width:
    msg = f"edge x={x_edge} outside [0, {dims.width}]"
    raise CoordinateRangeError(msg, "x")
  if not 0 <= y_edge <= dims.height:
    msg = f"edge y={y_edge} outside [0, {dims.height}]"
    raise CoordinateRangeError(msg, "y")
  return NormPoint(
    x=round_half_up_div(x_edge * SCALE, dims.width),
    y=round_half_up_div(y_edge * SCALE, dims.height),
  )


def normalize_box(b: PixelBox, dims: ScreenDims) -> NormBox:
  """Normalize each corner of an ordered pixel box."""
  if b.x1 > b.x2 or b.y1 > b.y2:
    msg = f"pixel box corners out of order: ({b.x1}, {b.y1})-({b.x2}, {b.y2})"
    raise GeometryError(msg)
  top_left = normalize_point(PixelPoint(b.x1, b.y1), dims)
  bottom_right = normalize_point(PixelPoint(b.x2, b.y2), dims)
  return NormBox(top_left.x, top_left.y, bottom_right.x, bottom_right.y)


def full_screen_box() -> NormBox:
  """Return the box covering the whole screen."""
  return NormBox(0, 0, SCALE, SCALE)


def point_in_box(p: NormPoint, b: NormBox) -> bool:
  """Return whether ``p`` lies inside ``b``, edges included."""
  return b.x1 <= p.x <= b.x2 and b.y1 <= p.y <= b.y2


def box_center(b: NormBox) -> NormPoint:
  """Return the round-half-up midpoint of a box."""
  return NormPoint(x=round_half_up_div(b.x1 + b.x2, 2), y=round_half_up_div(b.y1 + b.y2, 2))


def inflate_box(b: NormBox, units: int) -> NormBox:
  """Grow a box by ``units`` on every edge, clamped to the grid."""
  return NormBox(
    x1=max(0, b.x1 - units),
    y1=max(0, b.y1 - units),
    x2=min(SCALE, b.x2 + units),
    y2=min(SCALE, b.y2 + units),
  )


def unit_to_norm(value: object, axis: str) -> int:
  """Convert a coordinate expressed as a fraction in [0, 1] to the normalized grid."""
  if isinstance(value, bool) or not isinstance(value, int | float) or not math.isfinite(value):
    msg = f"{axis} must be a finite number, got {value!r}"
    raise GeometryError(msg)
  if not 0.0 <= value <= 1.0:
    msg = f"{axis}={value} outside the unit range [0, 1]"
    raise CoordinateRangeError(msg, axis)
  return math.floor(value * SCALE + 0.5)


def _decode(data: object, keys: tuple[str, ...], *, strict: bool, kind: str) -> dict[str, int]:
  if not isinstance(data, Mapping):
    msg = f"{kind} must be a JSON object, got {data!r}"
    raise GeometryError(msg)
  missing = [key for key in keys if key not in data]
  if missing:
    msg = f"{kind} is missing {', '.join(missing)}"
    raise GeometryError(msg)
  extra = sorted(str(key) for key in data if key not in keys)
  if strict and extra:
    msg = f"{kind} has unknown keys {', '.join(extra)}"
    raise GeometryError(msg)
  return {key: data[key] for key in keys}


def point_from_json(data: object, *, strict: bool = True) -> NormPoint:
  """Decode ``{"x": .., "y": ..}``. Unknown keys are rejected in strict mode, ignored otherwise."""
  values = _decode(data, POINT_KEYS, strict=strict, kind="point")
  return NormPoint(**values)


def box_from_json(data: object, *, strict: bool = True) -> NormBox:
  """Decode ``{"x1": .., "y1": .., "x2": .., "y2": ..}``."""
  values = _decode(data, BOX_KEYS, strict=strict, kind="box")
  return NormBox(**values)
