"""Function-call envelope encoding of canonical actions."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from guiag.actions.space import Action, ArgKind, ArgSpec, schema_for, shape_violations
from guiag.errors import ActionSchemaError
from guiag.geometry import point_from_json


@dataclass(frozen=True, slots=True)
class FunctionCallEnvelope:
  """``{"name": ..., "arguments": {...}}`` as exchanged with the model."""

  name: str
  arguments: dict[str, Any] = field(default_factory=dict)

  def as_dict(self) -> dict[str, Any]:
    """Return the JSON-ready dict."""
    return {"name": self.name, "arguments": self.arguments}

  def to_json(self) -> str:
    """Return deterministic, key-sorted, compact JSON."""
    return json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def to_envelope(action: Action) -> FunctionCallEnvelope:
  """Convert a valid action to its envelope."""
  violations = shape_violations(action)
  if violations:
    msg = "; ".join(violations)
    raise ActionSchemaError(msg, action.schema.category.value)
  arguments: dict[str, Any] = {}
  for spec in action.schema.args:
    value = getattr(action, spec.attr)
    if value is None:
      continue
    arguments[spec.key] = value.as_dict() if spec.kind is ArgKind.POINT else value
  return FunctionCallEnvelope(action.name, arguments)


def serialize_action(action: Action) -> str:
  """Return the envelope JSON text of an action."""
  return to_envelope(action).to_json()


def _decode_argument(spec: ArgSpec, value: object, category: str) -> object:
  if spec.kind is ArgKind.POINT:
    # range errors surface as geometry errors
    return point_from_json(value, strict=True)
  if not isinstance(value, str):
    msg = f"argument {spec.key!r} must be a string, got {type(value).__name__}"
    raise ActionSchemaError(msg, category)
  return value


def action_from_envelope(name: object, arguments: object) -> Action:
  """Build an action from decoded envelope fields with strict schema checks."""
  if not isinstance(name, str):
    msg = f"action name must be a string, got {name!r}"
    raise ActionSchemaError(msg)
  schema = schema_for(name)
  category = schema.category.value
  if not isinstance(arguments, dict):
    msg = f"arguments of {name} must be a JSON object"
    raise ActionSchemaError(msg, category)
  extra = sorted(str(key) for key in arguments if key not in schema.keys)
  if extra:
    msg = f"{name} ({category}) got unexpected arguments: {', '.join(extra)}"
    raise ActionSchemaError(msg, category)
  values: dict[str, object] = {}
  for spec in schema.args:
    if spec.key not in arguments:
      if spec.required:
        msg = f"{name} ({category}) is missing argument {spec.key!r}"
        raise ActionSchemaError(msg, category)
      continue
    values[spec.attr] = _decode_argument(spec, arguments[spec.key], category)
  action = Action(name=name, **values)
  violations = shape_violations(action)
  if violations:
    msg = "; ".join(violations)
    raise ActionSchemaError(msg, category)
  return action


def parse_action(text: str) -> Action:
  """Parse envelope JSON text into an action.

  Raises:
    ActionSchemaError: malformed JSON, missing or extra arguments, wrong value types.
    UnknownActionError: name outside the canonical space.
    GeometryError: coordinates that are not valid normalized integers.
  """
  try:
    data = json.loads(text)
  except (ValueError, RecursionError, TypeError) as err:
    # ValueError covers JSONDecodeError and integers past the digit limit
    msg = f"action envelope is not valid JSON: {err}"
    raise ActionSchemaError(msg) from None
  if not isinstance(data, dict):
    msg = "action envelope must be a JSON object"
    raise ActionSchemaError(msg)
  unknown = sorted(str(key) for key in data if key not in {"name", "arguments"})
  if unknown:
    msg = f"action envelope has unknown keys: {', '.join(unknown)}"
    raise ActionSchemaError(msg)
  if "name" not in data:
    msg = "action envelope is missing 'name'"
    raise ActionSchemaError(msg)
  return action_from_envelope(data["name"], data.get("arguments", {}))
