"""Canonical action space, function-call envelopes and dialect unification."""

from guiag.actions.codec import FunctionCallEnvelope, action_from_envelope, parse_action, serialize_action, to_envelope
from guiag.actions.space import (
  ACTION_SCHEMAS,
  CANONICAL_NAMES,
  DESKTOP_SPACE,
  DIRECTIONS,
  FULL_SPACE,
  MOBILE_SPACE,
  PLATFORM_SPACES,
  POINT_ACTIONS,
  TASK_STATUSES,
  WEB_SPACE,
  Action,
  ActionSchema,
  ActionSpaceConfig,
  ArgKind,
  ArgSpec,
  Category,
  ValidationReport,
  describe_action_space,
  require_valid,
  schema_for,
  shape_violations,
  validate_action,
)
from guiag.actions.unify import UnificationEntry, UnificationTable, default_table, unify_action

__all__ = [
  "ACTION_SCHEMAS",
  "CANONICAL_NAMES",
  "DESKTOP_SPACE",
  "DIRECTIONS",
  "FULL_SPACE",
  "MOBILE_SPACE",
  "PLATFORM_SPACES",
  "POINT_ACTIONS",
  "TASK_STATUSES",
  "WEB_SPACE",
  "Action",
  "ActionSchema",
  "ActionSpaceConfig",
  "ArgKind",
  "ArgSpec",
  "Category",
  "FunctionCallEnvelope",
  "UnificationEntry",
  "UnificationTable",
  "ValidationReport",
  "action_from_envelope",
  "default_table",
  "describe_action_space",
  "parse_action",
  "require_valid",
  "schema_for",
  "serialize_action",
  "shape_violations",
  "to_envelope",
  "unify_action",
  "validate_action",
]
