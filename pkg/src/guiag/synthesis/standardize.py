"""Stage-1 standardization: third-party records to canonical samples, plus response refinement."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from functools import cache
from importlib import resources
from typing import TYPE_CHECKING, Any

from guiag.errors import GeometryError, RaaParseError, StandardizationError
from guiag.geometry import NormBox, ScreenDims, normalize_edge, unit_to_norm
from guiag.logging import get_logger
from guiag.protocol import ChatMessage
from guiag.raa import RaaDocument, RaaSegment, emit_raa, parse_raa, references, wrap_first
from guiag.synthesis.records import STAGE1_KINDS, SampleSource, SFTSample, load_rows
from guiag.synthesis.templates import PromptTemplates, load_templates

if TYPE_CHECKING:
  from collections.abc import Mapping
  from pathlib import Path

  from guiag.synthesis.client import ChatClient

logger = get_logger()

DEFAULT_DIALECTS = "record_dialects_v1.json"
BOX_FORMATS = ("xyxy_list", "xywh_list", "xyxy_dict")
DEFAULT_TARGET = "target"


@dataclass(frozen=True, slots=True)
class RawRecord:
  """One stage-1 record as published by its dataset."""

  dialect: str
  record_id: str
  data: dict[str, Any]

  def as_dict(self) -> dict[str, Any]:
    """Return the JSON encoding."""
    return {"dialect": self.dialect, "id": self.record_id, "data": self.data}

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> RawRecord:
    """Decode the JSON encoding."""
    return cls(dialect=data["dialect"], record_id=str(data["id"]), data=dict(data["data"]))


def load_records(path: str | Path) -> list[RawRecord]:
  """Load raw stage-1 records from an NDJSON file."""
  return load_rows(path, RawRecord.from_dict, "record")


@dataclass(frozen=True, slots=True)
class RecordDialect:
  """Where a dataset keeps each field, and how it writes coordinates.

  Paths are dot-separated keys, with integers indexing into lists.
  """

  name: str
  convention: str = "norm1000"
  dataset: str | None = None
  dataset_path: str | None = None
  task_kind: str | None = None
  task_kind_path: str | None = None
  instruction_path: str | None = None
  response_path: str | None = None
  target_label_path: str | None = None
  box_path: str | None = None
  box_format: str = "xyxy_list"
  dims_path: str | None = None
  answer_path: str | None = None
  evidence_path: str | None = None
  evidence_label_key: str = "label"
  evidence_box_key: str = "bbox"
  summary_path: str | None = None

  @classmethod
  def from_dict(cls, name: str, data: Mapping[str, Any]) -> RecordDialect:
    """Decode one dialect entry, rejecting unknown keys."""
    known = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - known)
    if unknown:
      msg = f"unknown dialect keys {', '.join(unknown)}"
      raise StandardizationError(msg, name)
    return cls(name=name, **data)


@cache
def default_dialects() -> dict[str, RecordDialect]:
  """Load the bundled record dialects."""
  raw = json.loads(resources.files("guiag.data").joinpath(DEFAULT_DIALECTS).read_text(encoding="utf-8"))
  return {name: RecordDialect.from_dict(name, entry) for name, entry in raw["dialects"].items()}


def get_path(data: object, path: str) -> Any:
  """Follow a dot-separated path; a missing step raises `StandardizationError`."""
  current = data
  for part in path.split("."):
    if isinstance(current, dict) and part in current:
      current = current[part]
    elif isinstance(current, list) and part.isdigit() and int(part) < len(current):
      current = current[int(part)]
    else:
      msg = "field is missing"
      raise StandardizationError(msg, path)
  return current


def _get_str(data: object, path: str | None, *, default: str | None = None) -> str:
  if path is None:
    if default is None:
      msg = "dialect does not declare this field"
      raise StandardizationError(msg, "<unset>")
    return default
  try:
    value = get_path(data, path)
  except StandardizationError:
    if default is not None:
      return default
    raise
  if not isinstance(value, str):
    msg = f"expected a string, got {type(value).__name__}"
    raise StandardizationError(msg, path)
  return value


def _corners(value: object, box_format: str, path: str) -> tuple[Any, Any, Any, Any]:
  if box_format == "xyxy_dict":
    if not isinstance(value, dict):
      msg = "expected an {x1, y1, x2, y2} object"
      raise StandardizationError(msg, path)
    try:
      return value["x1"], value["y1"], value["x2"], value["y2"]
    except KeyError as err:
      msg = f"box is missing {err.args[0]}"
      raise StandardizationError(msg, path) from None
  if not isinstance(value, list) or len(value) != 4:  # noqa: PLR2004
    msg = "expected a list of four numbers"
    raise StandardizationError(msg, path)
  x1, y1, a, b = value
  if box_format == "xywh_list":
    if not all(isinstance(v, int | float) and not isinstance(v, bool) for v in value):
      msg = "box values must be numbers"
      raise StandardizationError(msg, path)
    return x1, y1, x1 + a, y1 + b
  return x1, y1, a, b


def read_box(value: object, dialect: RecordDialect, dims: ScreenDims | None, path: str) -> NormBox:
  """Convert a dataset box to a normalized box.

  Pixel boxes are read as screen edges, so a box reaching the right border (``x2 == width``) maps to
  1000.
  """
  if dialect.box_format not in BOX_FORMATS:
    msg = f"unknown box format {dialect.box_format!r}"
    raise StandardizationError(msg, path)
  x1, y1, x2, y2 = _corners(value, dialect.box_format, path)
  try:
    if dialect.convention == "pixel":
      if dims is None:
        msg = "pixel boxes need screen dimensions"
        raise StandardizationError(msg, dialect.dims_path or path)
      top_left = normalize_edge(x1, y1, dims)
      bottom_right = normalize_edge(x2, y2, dims)
      return NormBox(top_left.x, top_left.y, bottom_right.x, bottom_right.y)
    if dialect.convention == "unit_float":
      return NormBox(unit_to_norm(x1, "x1"), unit_to_norm(y1, "y1"), unit_to_norm(x2, "x2"), unit_to_norm(y2, "y2"))
    return NormBox(x1, y1, x2, y2)
  except GeometryError as err:
    raise StandardizationError(str(err), path) from err


def _read_dims(data: object, dialect: RecordDialect) -> ScreenDims | None:
  if dialect.dims_path is None:
    return None
  value = get_path(data, dialect.dims_path)
  try:
    if isinstance(value, list) and len(value) == 2:  # noqa: PLR2004
      return ScreenDims(value[0], value[1])
    return ScreenDims.from_dict(value)
  except (GeometryError, AttributeError) as err:
    raise StandardizationError(str(err), dialect.dims_path) from err


def _reference(box: NormBox, label: str, path: str) -> RaaSegment:
  try:
    return RaaSegment.reference(box, " ".join(label.split()) or DEFAULT_TARGET)
  except ValueError as err:
    raise StandardizationError(str(err), path) from err


def _canonical_response(data: object, dialect: RecordDialect) -> tuple[str, str]:
  path = dialect.response_path or "response"
  response = _get_str(data, path)
  try:
    doc = parse_raa(response, strict=True)
  except RaaParseError as err:
    raise StandardizationError(str(err), path) from err
  target = next((segment.content for segment in references(doc)), DEFAULT_TARGET)
  return response, target


def _grounding_response(data: object, dialect: RecordDialect, dims: ScreenDims | None) -> tuple[str, str]:
  path = dialect.box_path or "bbox"
  label = _get_str(data, dialect.target_label_path, default=DEFAULT_TARGET)
  box = read_box(get_path(data, path), dialect, dims, path)
  segment = _reference(box, label, dialect.target_label_path or path)
  return emit_raa(RaaDocument((segment,))), segment.content


def _qa_response(data: object, dialect: RecordDialect, dims: ScreenDims | None) -> tuple[str, str]:
  answer = " ".join(_get_str(data, dialect.answer_path).split())
  if not answer:
    msg = "answer is empty"
    raise StandardizationError(msg, dialect.answer_path or "answer")
  evidence = get_path(data, dialect.evidence_path) if dialect.evidence_path else []
  if not isinstance(evidence, list):
    msg = "evidence must be a list"
    raise StandardizationError(msg, dialect.evidence_path or "evidence")
  response = answer
  target = answer
  for idx, item in enumerate(evidence):
    path = f"{dialect.evidence_path}.{idx}"
    label = _get_str(item, dialect.evidence_label_key)
    box = read_box(get_path(item, dialect.evidence_box_key), dialect, dims, f"{path}.{dialect.evidence_box_key}")
    segment = _reference(box, label, f"{path}.{dialect.evidence_label_key}")
    response = wrap_first(response, segment.content, box)
    if idx == 0:
      target = segment.content
  return response, target


def _understanding_response(data: object, dialect: RecordDialect) -> tuple[str, str]:
  path = dialect.summary_path or "summary"
  value = get_path(data, path)
  candidates = value if isinstance(value, list) else [value]
  summary = next((" ".join(c.split()) for c in candidates if isinstance(c, str) and c.strip()), "")
  if not summary:
    msg = "no non-empty summary"
    raise StandardizationError(msg, path)
  summary = summary[0].upper() + summary[1:]
  if summary[-1] not in ".!?":
    summary += "."
  return summary, summary


def standardize_record(
  raw: RawRecord,
  *,
  dialects: Mapping[str, RecordDialect] | None = None,
  templates: PromptTemplates | None = None,
) -> SFTSample:
  """Map a raw stage-1 record onto a canonical sample.

  Coordinates are normalized, instructions go through the template registry (ambiguous ones are
  rewritten), and spatial targets become reference markers in the response. Records of the
  ``canonical`` dialect come back unchanged, which makes the operation idempotent.

  Raises:
    StandardizationError: With the path of the field that could not be mapped.
  """
  dialects = default_dialects() if dialects is None else dialects
  templates = templates or load_templates()
  dialect = dialects.get(raw.dialect)
  if dialect is None:
    msg = f"unknown record dialect {raw.dialect!r}"
    raise StandardizationError(msg, "dialect")
  data = raw.data
  task_kind = dialect.task_kind or _get_str(data, dialect.task_kind_path)
  if task_kind not in STAGE1_KINDS:
    msg = f"not a stage-1 task kind: {task_kind!r}"
    raise StandardizationError(msg, dialect.task_kind_path or "task_kind")
  dataset = dialect.dataset or _get_str(data, dialect.dataset_path, default=raw.dialect)
  dims = _read_dims(data, dialect)
  instruction = _get_str(data, dialect.instruction_path, default="")

  if dialect.response_path is not None:
    response, target = _canonical_response(data, dialect)
  elif task_kind == "stage1_grounding":
    response, target = _grounding_response(data, dialect, dims)
  elif task_kind == "stage1_qa":
    response, target = _qa_response(data, dialect, dims)
  else:
    response, target = _understanding_response(data, dialect)

  key = f"{dataset}:{raw.record_id}"
  if dialect.response_path is not None and not templates.is_ambiguous(instruction):
    user = instruction
  else:
    user = templates.instruction(task_kind, instruction, target=target, key=key)
  if templates.is_ambiguous(instruction):
    logger.debug("Rewrote ambiguous instruction of %s", key)

  return SFTSample(
    messages=(
      ChatMessage("system", templates.stage1_system),
      ChatMessage("user", user),
      ChatMessage("assistant", response),
    ),
    source=SampleSource(dataset=dataset, trajectory=raw.record_id, step=0),
    task_kind=task_kind,
  )


def to_canonical_record(sample: SFTSample) -> RawRecord:
  """Express a stage-1 sample as a record of the ``canonical`` dialect."""
  user = next(message.content for message in reversed(sample.messages) if message.role == "user")
  return RawRecord(
    dialect="canonical",
    record_id=sample.source.trajectory,
    data={
      "dataset": sample.source.dataset,
      "task_kind": sample.task_kind,
      "instruction": user,
      "response": sample.response,
    },
  )


@dataclass(frozen=True, slots=True)
class RefinedResponse:
  """Outcome of refinement; ``flagged`` responses kept the original text."""

  text: str
  flagged: bool = False
  reason: str | None = None


def _refinement_problem(original: str, refined: str, min_chars: int, max_chars: int) -> str | None:
  try:
    refined_doc = parse_raa(refined, strict=True)
  except RaaParseError as err:
    return f"broken reference marker: {err}"
  length = len(refined_doc.text.strip())
  if not min_chars <= length <= max_chars:
    return f"length {length} outside [{min_chars}, {max_chars}]"
  before = sorted((s.ref_type or "", str(s.coords)) for s in references(parse_raa(original, strict=False)))
  after = sorted((s.ref_type or "", str(s.coords)) for s in references(refined_doc))
  if before != after:
    return "spatial references changed"
  return None


def refine_response(
  sample: SFTSample,
  client: ChatClient,
  *,
  templates: PromptTemplates | None = None,
  min_chars: int = 1,
  max_chars: int = 2000,
) -> RefinedResponse:
  """Ask the client to reformulate the response and validate the result.

  A refinement that breaks a marker, leaves the length bounds or changes the set of references is
  discarded: the original response is kept and flagged.

  Raises:
    ClientTransportError: The client could not be reached; callers may retry.
  """
  templates = templates or load_templates()
  original = sample.response
  refined = client.complete(templates.messages("refine", response=original))
  problem = _refinement_problem(original, refined, min_chars, max_chars)
  if problem is not None:
    logger.warning("Refinement of %s/%s flagged: %s", sample.source.dataset, sample.source.trajectory, problem)
    return RefinedResponse(text=original, flagged=True, reason=problem)
  return RefinedResponse(text=refined)


def apply_refinement(sample: SFTSample, refined: RefinedResponse) -> SFTSample:
  """Return the sample with its assistant turn replaced by the refined text."""
  messages = (*sample.messages[:-1], ChatMessage("assistant", refined.text))
  return SFTSample(messages=messages, source=sample.source, task_kind=sample.task_kind)
