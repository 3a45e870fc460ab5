"""Reference-augmented annotation (RAA): text interleaved with spatial references.

A reference marker wraps a span of text and ties it to a region of the screen::

  Tap <ref type="point" x="500" y="500" note="submit">the Submit button</ref> to continue
  <ref type="box" x1="10" y1="20" x2="300" y2="80">Settings</ref>

Attributes always appear in the order shown, coordinates are normalized integers, ``note`` is
optional and HTML-escaped. Markers do not nest. Everything outside markers is kept verbatim.
"""

from __future__ import annotations

import html
import re
from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

from guiag.errors import GeometryError, RaaParseError
from guiag.geometry import BOX_KEYS, POINT_KEYS, NormBox, NormPoint

if TYPE_CHECKING:
  from collections.abc import Iterator

SegmentKind = Literal["plain_text", "reference"]

_TOKEN = re.compile(r"<ref(?=[\s>/])|</ref>")
_OPEN_TAG = re.compile(r'<ref((?:\s+[A-Za-z0-9_]+="[^"<>]*")*)\s*>')
_ATTR = re.compile(r'\s+([A-Za-z0-9_]+)="([^"<>]*)"')
_INT = re.compile(r"\d{1,6}")
_CLOSE = "</ref>"


@dataclass(frozen=True, slots=True)
class RaaSegment:
  """A run of plain text, or a reference wrapping ``content``."""

  kind: SegmentKind
  content: str
  coords: NormPoint | NormBox | None = None
  note: str | None = None

  def __post_init__(self) -> None:
    """Check reference fields are consistent with the segment kind."""
    if self.kind == "plain_text":
      if self.coords is not None or self.note is not None:
        msg = "plain text segments carry no coordinates or note"
        raise ValueError(msg)
      return
    if not isinstance(self.coords, NormPoint | NormBox):
      msg = "reference segments need a NormPoint or NormBox"
      raise ValueError(msg)
    if not self.content:
      msg = "reference content must not be empty"
      raise ValueError(msg)
    if _TOKEN.search(self.content):
      msg = "reference content must not contain ref markers"
      raise ValueError(msg)

  @classmethod
  def plain(cls, text: str) -> RaaSegment:
    """Create a plain text segment."""
    return cls("plain_text", text)

  @classmethod
  def reference(cls, coords: NormPoint | NormBox, content: str, note: str | None = None) -> RaaSegment:
    """Create a reference segment."""
    return cls("reference", content, coords, note)

  @property
  def ref_type(self) -> str | None:
    """Return ``"point"``, ``"box"`` or ``None`` for plain text."""
    if self.coords is None:
      return None
    return "point" if isinstance(self.coords, NormPoint) else "box"


@dataclass(frozen=True, slots=True)
class RaaDocument:
  """Ordered segments. Plain segments are never empty and never adjacent."""

  segments: tuple[RaaSegment, ...] = ()

  def __post_init__(self) -> None:
    """Enforce the normal form that makes parse and emit exact inverses."""
    previous_plain = False
    for segment in self.segments:
      is_plain = segment.kind == "plain_text"
      if is_plain and not segment.content:
        msg = "empty plain text segment"
        raise ValueError(msg)
      if is_plain and previous_plain:
        msg = "adjacent plain text segments must be merged"
        raise ValueError(msg)
      if is_plain and _holds_marker(segment.content):
        msg = f"plain text segment holds a well-formed reference marker: {segment.content!r}"
        raise ValueError(msg)
      previous_plain = is_plain

  @property
  def text(self) -> str:
    """Return the document with markers removed."""
    return "".join(segment.content for segment in self.segments)


def emit_segment(segment: RaaSegment) -> str:
  """Render one segment; plain text is returned as is."""
  if segment.kind == "plain_text":
    return segment.content
  coords = segment.coords
  attrs = [f'type="{segment.ref_type}"']
  keys = POINT_KEYS if isinstance(coords, NormPoint) else BOX_KEYS
  attrs.extend(f'{key}="{getattr(coords, key)}"' for key in keys)
  if segment.note is not None:
    attrs.append(f'note="{html.escape(segment.note, quote=True)}"')
  return f"<ref {' '.join(attrs)}>{segment.content}{_CLOSE}"


def emit_raa(doc: RaaDocument) -> str:
  """Render a document to text."""
  return "".join(emit_segment(segment) for segment in doc.segments)


def _byte_offset(text: str, offset: int) -> int:
  return len(text[:offset].encode("utf-8"))


def _error(text: str, offset: int, msg: str) -> RaaParseError:
  return RaaParseError(f"{msg} at offset {offset}", offset, _byte_offset(text, offset))


def _decode_coords(attrs: dict[str, str]) -> NormPoint | NormBox:
  ref_type = attrs.pop("type", None)
  if ref_type not in {"point", "box"}:
    msg = f"reference type must be point or box, got {ref_type!r}"
    raise ValueError(msg)
  keys = POINT_KEYS if ref_type == "point" else BOX_KEYS
  values = {}
  for key in keys:
    raw = attrs.pop(key, None)
    if raw is None:
      msg = f"{ref_type} reference is missing {key}"
      raise ValueError(msg)
    if not _INT.fullmatch(raw):
      msg = f"coordinate {key}={raw!r} is not an integer"
      raise ValueError(msg)
    values[key] = int(raw)
  if attrs:
    msg = f"unexpected attributes {', '.join(sorted(attrs))}"
    raise ValueError(msg)
  try:
    return NormPoint(**values) if ref_type == "point" else NormBox(**values)
  except GeometryError as err:
    raise ValueError(str(err)) from err


def _read_marker(text: str, start: int) -> tuple[RaaSegment, int]:
  """Read the marker opening at ``start``; return the segment and the offset after ``</ref>``."""
  tag = _OPEN_TAG.match(text, start)
  if tag is None:
    raise _error(text, start, "malformed reference tag")
  nxt = _TOKEN.search(text, tag.end())
  if nxt is None:
    raise _error(text, start, "unclosed reference")
  if nxt.group() != _CLOSE:
    raise _error(text, nxt.start(), "nested reference")
  attrs: dict[str, str] = {}
  for name, value in _ATTR.findall(tag.group(1)):
    if name in attrs:
      raise _error(text, start, f"duplicate attribute {name}")
    attrs[name] = value
  note = attrs.pop("note", None)
  if note is not None:
    note = html.unescape(note)
  try:
    coords = _decode_coords(attrs)
    segment = RaaSegment.reference(coords, text[tag.end() : nxt.start()], note)
  except ValueError as err:
    raise _error(text, start, str(err)) from None
  end = nxt.end()
  if emit_segment(segment) != text[start:end]:
    raise _error(text, start, "reference is not in canonical form")
  return segment, end


def _holds_marker(text: str) -> bool:
  # malformed markers may stay in plain text, well-formed ones would parse back as references
  for token in _TOKEN.finditer(text):
    if token.group() == _CLOSE:
      continue
    try:
      _read_marker(text, token.start())
    except RaaParseError:
      continue
    return True
  return False


def parse_raa(text: str, *, strict: bool = True) -> RaaDocument:
  """Split text into plain and reference segments.

  Args:
    text: Reference-augmented text.
    strict: Raise on malformed markers. When false, malformed markers are kept as plain text.

  Returns:
    The parsed document; `emit_raa` reproduces ``text`` exactly.

  Raises:
    RaaParseError: Strict mode only, with character and byte offsets of the offending marker.
  """
  segments: list[RaaSegment] = []
  plain_start = 0
  pos = 0
  while (token := _TOKEN.search(text, pos)) is not None:
    if token.group() == _CLOSE:
      if strict:
        raise _error(text, token.start(), "closing tag without opening tag")
      pos = token.end()
      continue
    try:
      segment, end = _read_marker(text, token.start())
    except RaaParseError:
      if strict:
        raise
      pos = token.end()
      continue
    if token.start() > plain_start:
      segments.append(RaaSegment.plain(text[plain_start : token.start()]))
    segments.append(segment)
    plain_start = pos = end
  if plain_start < len(text):
    segments.append(RaaSegment.plain(text[plain_start:]))
  return RaaDocument(tuple(segments))


def strip_raa(text: str, *, strict: bool = True) -> str:
  """Remove markers, keeping the wrapped content in place."""
  return parse_raa(text, strict=strict).text


def references(doc: RaaDocument) -> Iterator[RaaSegment]:
  """Yield the reference segments in document order."""
  return (segment for segment in doc.segments if segment.kind == "reference")


def wrap_first(text: str, label: str, coords: NormPoint | NormBox, note: str | None = None) -> str:
  """Wrap the first plain occurrence of ``label`` in a reference marker.

  When ``label`` does not occur outside existing markers, a marker around ``label`` is appended
  after a single space instead.
  """
  marker = RaaSegment.reference(coords, label, note)
  doc = parse_raa(text, strict=False)
  out: list[str] = []
  wrapped = False
  for segment in doc.segments:
    idx = segment.content.find(label) if segment.kind == "plain_text" and not wrapped else -1
    if idx < 0:
      out.append(emit_segment(segment))
      continue
    out.extend((segment.content[:idx], emit_segment(marker), segment.content[idx + len(label) :]))
    wrapped = True
  if not wrapped:
    out.append(f"{' ' if text else ''}{emit_segment(marker)}")
  return "".join(out)
