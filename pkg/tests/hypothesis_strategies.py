"""Hypothesis strategies for coordinates, actions, annotated text and reasoning records."""

from __future__ import annotations

import string

from hypothesis import strategies as st

from guiag.actions import ACTION_SCHEMAS, CANONICAL_NAMES, DIRECTIONS, TASK_STATUSES, Action, ArgKind
from guiag.geometry import SCALE, NormBox, NormPoint, PixelPoint, ScreenDims
from guiag.protocol import ReasoningRecord
from guiag.raa import RaaDocument, RaaSegment

# no "<" so plain text never contains a marker token, no backtick so sections never hold a fence
TEXT_ALPHABET = string.ascii_letters + string.digits + " .,:;!?'\"&()-_/\n"
LINE_ALPHABET = string.ascii_letters + string.digits + " .,:;!?'&()-"
# envelope and coordinate keys, plus one that is always unknown
_JSON_KEYS = ("x", "y", "point", "start", "end", "text", "direction", "status", "content", "name", "arguments", "z")

coords = st.integers(min_value=0, max_value=SCALE)


@st.composite
def norm_points(draw: st.DrawFn) -> NormPoint:
  return NormPoint(draw(coords), draw(coords))


@st.composite
def norm_boxes(draw: st.DrawFn) -> NormBox:
  x1, x2 = sorted((draw(coords), draw(coords)))
  y1, y2 = sorted((draw(coords), draw(coords)))
  return NormBox(x1, y1, x2, y2)


@st.composite
def screen_dims(draw: st.DrawFn, *, max_side: int = 4000) -> ScreenDims:
  return ScreenDims(draw(st.integers(1, max_side)), draw(st.integers(1, max_side)))


@st.composite
def pixels_on(draw: st.DrawFn, dims: ScreenDims) -> PixelPoint:
  return PixelPoint(draw(st.integers(0, dims.width - 1)), draw(st.integers(0, dims.height - 1)))


def json_values() -> st.SearchStrategy[object]:
  """Arbitrary JSON documents, coordinate-sized integers included."""
  scalars = st.none() | st.booleans() | st.integers(-2000, 2000) | st.floats(allow_nan=False) | st.text(max_size=10)
  keys = st.sampled_from(_JSON_KEYS)
  return st.recursive(
    scalars,
    lambda children: st.lists(children, max_size=4) | st.dictionaries(keys, children, max_size=4),
    max_leaves=12,
  )


def short_text(*, min_size: int = 1, max_size: int = 30) -> st.SearchStrategy[str]:
  """Single-line text without surrounding whitespace."""
  return st.text(alphabet=LINE_ALPHABET, min_size=min_size, max_size=max_size).map(str.strip).filter(bool)


@st.composite
def actions(
  draw: st.DrawFn,
  names: tuple[str, ...] = CANONICAL_NAMES,
  texts: st.SearchStrategy[str] | None = None,
) -> Action:
  """Draw a well-formed canonical action, optional arguments included or not."""
  name = draw(st.sampled_from(names))
  values: dict[str, object] = {}
  for spec in ACTION_SCHEMAS[name].args:
    if not spec.required and draw(st.booleans()):
      continue
    match spec.kind:
      case ArgKind.POINT:
        values[spec.attr] = draw(norm_points())
      case ArgKind.DIRECTION:
        values[spec.attr] = draw(st.sampled_from(DIRECTIONS))
      case ArgKind.STATUS:
        values[spec.attr] = draw(st.sampled_from(TASK_STATUSES))
      case ArgKind.TEXT:
        values[spec.attr] = draw(texts if texts is not None else st.text(max_size=20))
  return Action(name, **values)  # type: ignore[arg-type]


@st.composite
def raa_documents(draw: st.DrawFn, *, max_segments: int = 6) -> RaaDocument:
  """Draw a document in normal form: no empty plain runs, no adjacent plain runs."""
  segments: list[RaaSegment] = []
  for _ in range(draw(st.integers(0, max_segments))):
    if draw(st.booleans()):
      text = draw(st.text(alphabet=TEXT_ALPHABET, min_size=1, max_size=20))
      if segments and segments[-1].kind == "plain_text":
        segments[-1] = RaaSegment.plain(segments[-1].content + text)
      else:
        segments.append(RaaSegment.plain(text))
      continue
    target = draw(st.one_of(norm_points(), norm_boxes()))
    content = draw(st.text(alphabet=TEXT_ALPHABET, min_size=1, max_size=20))
    note = draw(st.none() | st.text(alphabet=TEXT_ALPHABET + "<>", max_size=12))
    segments.append(RaaSegment.reference(target, content, note))
  return RaaDocument(tuple(segments))


def _fence_free(text: str) -> bool:
  return not any(line.lstrip().startswith("```") for line in text.split("\n"))


def section_text(*, max_size: int = 40) -> st.SearchStrategy[str]:
  """Any Unicode text a reasoning section can hold: trimmed, non-empty, no fence lines."""
  return st.text(max_size=max_size).map(str.strip).filter(bool).filter(_fence_free)


@st.composite
def reasoning_records(
  draw: st.DrawFn, t: int, texts: st.SearchStrategy[str] | None = None
) -> ReasoningRecord:
  """Draw a record that satisfies the reflection rule at step ``t``."""
  texts = texts if texts is not None else short_text()
  return ReasoningRecord(
    reflection=draw(texts) if t > 0 else None,
    strategic_summary=draw(texts),
    strategic_planning=draw(texts),
    tactical=draw(texts),
    expectation=draw(texts),
  )
