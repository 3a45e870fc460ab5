"""Exception hierarchy shared by every guiag module."""

from __future__ import annotations

from typing import TYPE_CHECKING

if TYPE_CHECKING:
  from collections.abc import Sequence


class GuiagError(Exception):
  """Base class for all errors raised by guiag."""


class GeometryError(GuiagError, ValueError):
  """Invalid spatial value (wrong type, disordered corners, bad dimensions)."""


class CoordinateRangeError(GeometryError):
  """A coordinate falls outside its allowed range."""

  def __init__(self, msg: str, axis: str) -> None:
    """Initialize with the offending axis name."""
    super().__init__(msg)
    self.axis = axis


class ActionError(GuiagError, ValueError):
  """Base class for action-space errors."""


class UnknownActionError(ActionError):
  """The action name is not one of the canonical names."""


class ActionSchemaError(ActionError):
  """Action arguments do not match the schema of the action's category."""

  def __init__(self, msg: str, category: str | None = None) -> None:
    """Initialize with the expected category label, when known."""
    super().__init__(msg)
    self.category = category


class ActionValidationError(ActionError):
  """An action failed validation against an action-space configuration."""

  def __init__(self, msg: str, violations: Sequence[str] = ()) -> None:
    """Initialize with the individual violations."""
    super().__init__(msg)
    self.violations = tuple(violations)


class UnificationError(ActionError):
  """A dialect action could not be mapped onto the canonical action space."""

  def __init__(self, msg: str, dialect: str, source_name: str) -> None:
    """Initialize with the dialect and source action name."""
    super().__init__(msg)
    self.dialect = dialect
    self.source_name = source_name


class RaaParseError(GuiagError, ValueError):
  """Malformed reference marker in reference-augmented text."""

  def __init__(self, msg: str, offset: int, byte_offset: int) -> None:
    """Initialize with character and UTF-8 byte offsets of the marker."""
    super().__init__(f"{msg} (byte offset {byte_offset})")
    self.offset = offset
    self.byte_offset = byte_offset


class ProtocolError(GuiagError):
  """Violation of the agent-environment protocol."""


class StructuredOutputError(ProtocolError, ValueError):
  """Model output is missing a mandatory section or is otherwise malformed."""

  def __init__(self, msg: str, section: str) -> None:
    """Initialize with the offending section label."""
    super().__init__(msg)
    self.section = section


class ReflectionRuleError(ProtocolError, ValueError):
  """Reflection present at the first step, or missing afterwards."""


class EpisodeStateError(ProtocolError, RuntimeError):
  """Operation not allowed in the current episode state."""


class EpisodeConfigError(ProtocolError, ValueError):
  """Invalid episode construction parameters."""


class MockEnvError(GuiagError):
  """Base class for scripted-environment errors."""


class TaskLookupError(MockEnvError, KeyError):
  """Unknown task id."""

  def __str__(self) -> str:
    """Return the message without KeyError's quoting."""
    return str(self.args[0]) if self.args else ""


class EnvStateError(MockEnvError, RuntimeError):
  """Operation not allowed in the current environment state."""


class ScriptError(MockEnvError, ValueError):
  """Malformed app script."""


class SynthesisError(GuiagError):
  """A synthesis step could not produce valid output."""


class StandardizationError(SynthesisError, ValueError):
  """A raw record could not be mapped onto the canonical format."""

  def __init__(self, msg: str, field_path: str) -> None:
    """Initialize with the path of the unmappable field."""
    super().__init__(f"{field_path}: {msg}")
    self.field_path = field_path


class ClientTransportError(SynthesisError):
  """Chat-completion transport failure; callers may retry."""

  retryable = True


class ConfigError(GuiagError, ValueError):
  """Invalid configuration file or flag."""


class EvaluationError(GuiagError, ValueError):
  """Invalid evaluation input, such as an empty grounding suite."""
