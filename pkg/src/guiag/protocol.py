"""Agent-environment protocol: episode state, structured model output and prompt assembly.

Each step the agent sees the goal, the current observation and a window of the last ``n`` steps,
and answers with labeled sections::

  ```reflection
  (absent at the first step)
  ```
  ```summary
  ...
  ```
  ```planning
  ...
  ```
  ```tactical
  ...
  ```
  ```expectation
  ...
  ```
  ```action
  {"arguments":{"point":{"x":500,"y":120}},"name":"tap"}
  ```
"""

from __future__ import annotations

import dataclasses
import json
import re
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal

from guiag.actions import FULL_SPACE, Action, ActionSpaceConfig, describe_action_space, parse_action, require_valid
from guiag.actions.codec import serialize_action
from guiag.errors import (
  EpisodeConfigError,
  EpisodeStateError,
  GuiagError,
  ProtocolError,
  ReflectionRuleError,
  StructuredOutputError,
)
from guiag.geometry import NormBox, ScreenDims, box_from_json

if TYPE_CHECKING:
  from collections.abc import Iterable, Mapping

DEFAULT_WINDOW = 2
DEFAULT_MAX_STEPS = 30

REASONING_LABELS = ("reflection", "summary", "planning", "tactical", "expectation")
ACTION_LABEL = "action"
_FIELDS = {
  "reflection": "reflection",
  "summary": "strategic_summary",
  "planning": "strategic_planning",
  "tactical": "tactical",
  "expectation": "expectation",
}
_FENCE = "```"
_OPEN = re.compile(r"```([A-Za-z_]+)")


class EpisodeStatus(StrEnum):
  """Lifecycle of an episode. Only ``running`` accepts new steps."""

  RUNNING = "running"
  COMPLETE = "complete"
  INFEASIBLE = "infeasible"
  EXHAUSTED = "exhausted"
  # agent output could not be parsed and the runner gave up
  ABORTED = "aborted"


@dataclass(frozen=True, slots=True)
class SceneElement:
  """One element of a structured screen descriptor."""

  element_id: str
  role: str
  label: str
  box: NormBox
  editable: bool = False
  text: str = ""

  def as_dict(self) -> dict[str, Any]:
    """Return the JSON encoding."""
    return {
      "id": self.element_id,
      "role": self.role,
      "label": self.label,
      "box": self.box.as_dict(),
      "editable": self.editable,
      "text": self.text,
    }

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> SceneElement:
    """Decode the JSON encoding."""
    return cls(
      element_id=str(data["id"]),
      role=str(data.get("role", "element")),
      label=str(data.get("label", "")),
      box=box_from_json(data["box"]),
      editable=bool(data.get("editable", False)),
      text=str(data.get("text", "")),
    )


@dataclass(frozen=True, slots=True)
class Observation:
  """What the agent sees at one step: a structured scene, a text description, or both."""

  obs_id: str
  dims: ScreenDims
  scene: tuple[SceneElement, ...] | None = None
  description: str | None = None
  timestamp: int = 0

  def __post_init__(self) -> None:
    """Require some content and unique element ids."""
    if self.scene is None and not self.description:
      msg = f"observation {self.obs_id} has neither a scene nor a description"
      raise ProtocolError(msg)
    if self.scene is not None:
      ids = [element.element_id for element in self.scene]
      if len(ids) != len(set(ids)):
        msg = f"observation {self.obs_id} repeats element ids"
        raise ProtocolError(msg)

  def with_description(self, description: str) -> Observation:
    """Return a copy carrying a text description."""
    return dataclasses.replace(self, description=description)

  def as_dict(self) -> dict[str, Any]:
    """Return the JSON encoding."""
    return {
      "id": self.obs_id,
      "dims": self.dims.as_dict(),
      "scene": None if self.scene is None else [element.as_dict() for element in self.scene],
      "description": self.description,
      "timestamp": self.timestamp,
    }

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> Observation:
    """Decode the JSON encoding."""
    scene = data.get("scene")
    return cls(
      obs_id=str(data["id"]),
      dims=ScreenDims.from_dict(data["dims"]),
      scene=None if scene is None else tuple(SceneElement.from_dict(element) for element in scene),
      description=data.get("description"),
      timestamp=int(data.get("timestamp", 0)),
    )


@dataclass(frozen=True, slots=True)
class ReasoningRecord:
  """Reflection, strategic and tactical reasoning, and the expectation of one step."""

  reflection: str | None
  strategic_summary: str
  strategic_planning: str
  tactical: str
  expectation: str

  def __post_init__(self) -> None:
    """Mandatory sections must be non-empty and no section may contain a fence line."""
    for label, attr in _FIELDS.items():
      value = getattr(self, attr)
      if label == "reflection" and value is None:
        continue
      if not isinstance(value, str):
        msg = f"{label} section must be text"
        raise StructuredOutputError(msg, label)
      if label != "reflection" and not value.strip():
        msg = f"{label} section is empty"
        raise StructuredOutputError(msg, label)
      if any(line.lstrip().startswith(_FENCE) for line in value.split("\n")):
        msg = f"{label} section contains a fence line"
        raise StructuredOutputError(msg, label)

  def sections(self) -> dict[str, str]:
    """Return the present sections keyed by output label, in output order."""
    values = {label: getattr(self, attr) for label, attr in _FIELDS.items()}
    return {label: value for label, value in values.items() if value is not None}

  def as_dict(self) -> dict[str, str | None]:
    """Return the JSON encoding."""
    return {attr: getattr(self, attr) for attr in _FIELDS.values()}

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> ReasoningRecord:
    """Decode the JSON encoding."""
    return cls(**{attr: data.get(attr) for attr in _FIELDS.values()})


@dataclass(frozen=True, slots=True)
class StepRecord:
  """One completed step of an episode."""

  observation: Observation
  reasoning: ReasoningRecord
  action: Action


@dataclass(frozen=True, slots=True)
class EpisodeState:
  """Immutable episode value; every update returns a new state."""

  goal: str
  window_size: int
  action_space: ActionSpaceConfig
  max_steps: int = DEFAULT_MAX_STEPS
  describe_history: bool = True
  steps: tuple[StepRecord, ...] = ()
  status: EpisodeStatus = EpisodeStatus.RUNNING

  @property
  def t(self) -> int:
    """Return the index of the next step."""
    return len(self.steps)

  @property
  def is_terminal(self) -> bool:
    """Return whether the episode accepts no more steps."""
    return self.status is not EpisodeStatus.RUNNING

  def window(self) -> tuple[StepRecord, ...]:
    """Return the last ``min(t, n)`` steps, oldest first."""
    return self.steps[max(0, len(self.steps) - self.window_size) :]


@dataclass(frozen=True, slots=True)
class StepInput:
  """Everything the agent receives at step ``t``."""

  goal: str
  observation: Observation
  history: tuple[StepRecord, ...]
  action_space: ActionSpaceConfig
  t: int
  describe_history: bool = True

  @property
  def history_start(self) -> int:
    """Return the step index of the oldest history entry."""
    return self.t - len(self.history)


@dataclass(frozen=True, slots=True)
class ChatMessage:
  """A chat turn."""

  role: Literal["system", "user", "assistant"]
  content: str

  def as_dict(self) -> dict[str, str]:
    """Return the chat-completion encoding."""
    return {"role": self.role, "content": self.content}


def new_episode(
  goal: str,
  window_size: int = DEFAULT_WINDOW,
  cfg: ActionSpaceConfig = FULL_SPACE,
  *,
  max_steps: int = DEFAULT_MAX_STEPS,
  describe_history: bool = True,
) -> EpisodeState:
  """Start an episode.

  Raises:
    EpisodeConfigError: Empty goal, ``window_size < 1`` or ``max_steps < 1``.
  """
  if not goal.strip():
    msg = "episode goal must not be empty"
    raise EpisodeConfigError(msg)
  if window_size < 1:
    msg = f"history window must be at least 1, got {window_size}"
    raise EpisodeConfigError(msg)
  if max_steps < 1:
    msg = f"max_steps must be at least 1, got {max_steps}"
    raise EpisodeConfigError(msg)
  return EpisodeState(
    goal=goal,
    window_size=window_size,
    action_space=cfg,
    max_steps=max_steps,
    describe_history=describe_history,
  )


def _require_running(state: EpisodeState) -> None:
  if state.is_terminal:
    msg = f"episode is {state.status}; no further steps allowed"
    raise EpisodeStateError(msg)


def build_step_input(state: EpisodeState, observation: Observation) -> StepInput:
  """Assemble the agent input for the next step."""
  _require_running(state)
  return StepInput(
    goal=state.goal,
    observation=observation,
    history=state.window(),
    action_space=state.action_space,
    t=state.t,
    describe_history=state.describe_history,
  )


def check_reflection(record: ReasoningRecord, t: int) -> None:
  """Reflection is absent at the first step and non-empty at every later one."""
  if t == 0 and record.reflection is not None:
    msg = "reflection must be absent at step 0"
    raise ReflectionRuleError(msg)
  if t > 0 and not (record.reflection and record.reflection.strip()):
    msg = f"reflection is required at step {t}"
    raise ReflectionRuleError(msg)


def record_step(state: EpisodeState, observation: Observation, record: ReasoningRecord, action: Action) -> EpisodeState:
  """Append a step and advance the episode status."""
  _require_running(state)
  require_valid(action, state.action_space)
  check_reflection(record, state.t)
  if any(step.observation.obs_id == observation.obs_id for step in state.steps):
    msg = f"observation id {observation.obs_id} already recorded in this episode"
    raise EpisodeStateError(msg)
  steps = (*state.steps, StepRecord(observation, record, action))
  status = EpisodeStatus.RUNNING
  if action.is_terminal:
    status = EpisodeStatus(action.status)
  elif len(steps) >= state.max_steps:
    status = EpisodeStatus.EXHAUSTED
  return dataclasses.replace(state, steps=steps, status=status)


def _split_sections(text: str, *, strict: bool) -> list[tuple[str, str]]:
  """Cut model output into ``(label, content)`` blocks."""
  blocks: list[tuple[str, str]] = []
  label: str | None = None
  body: list[str] = []
  for raw in text.split("\n"):
    line = raw if strict else raw.strip()
    if label is None:
      opened = _OPEN.fullmatch(line.rstrip())
      if opened:
        label = opened.group(1) if strict else opened.group(1).lower()
        body = []
      elif strict and line.strip():
        msg = f"unexpected text outside sections: {line.strip()[:40]!r}"
        raise StructuredOutputError(msg, "output")
      continue
    if line.rstrip() == _FENCE:
      blocks.append((label, "\n".join(body).strip()))
      label = None
    else:
      body.append(raw)
  if label is not None:
    msg = f"section {label!r} is not closed"
    raise StructuredOutputError(msg, label)
  return blocks


def _collect(text: str, t: int, *, strict: bool, need_action: bool) -> dict[str, str]:
  blocks = _split_sections(text, strict=strict)
  labels = [label for label, _ in blocks]
  if "reflection" in labels and t == 0:
    msg = "reflection must be absent at step 0"
    raise ReflectionRuleError(msg)
  expected = [label for label in REASONING_LABELS if t > 0 or label != "reflection"]
  if strict:
    for label in expected + [ACTION_LABEL] * need_action:
      if label not in labels:
        msg = f"missing {label} section"
        raise StructuredOutputError(msg, label)
    if labels not in (expected, [*expected, ACTION_LABEL]):
      msg = f"sections out of order: {', '.join(labels)}"
      raise StructuredOutputError(msg, "output")
  sections: dict[str, str] = {}
  for label, content in blocks:
    sections.setdefault(label, content)
  for label in expected + [ACTION_LABEL] * need_action:
    if label not in sections:
      msg = f"missing {label} section"
      raise StructuredOutputError(msg, label)
    if not sections[label]:
      msg = f"{label} section is empty"
      raise StructuredOutputError(msg, label)
  return sections


def _record_from(sections: Mapping[str, str], t: int) -> ReasoningRecord:
  return ReasoningRecord(
    reflection=sections["reflection"] if t > 0 else None,
    strategic_summary=sections["summary"],
    strategic_planning=sections["planning"],
    tactical=sections["tactical"],
    expectation=sections["expectation"],
  )


def parse_reasoning(model_output: str, t: int, *, strict: bool = True) -> ReasoningRecord:
  """Extract the reasoning sections of step ``t``.

  Strict mode wants exact lower-case labels in output order with nothing outside the blocks; the
  action block may follow. Lenient mode matches labels case-insensitively, in any order, and
  ignores stray text and unknown blocks.

  Raises:
    StructuredOutputError: A mandatory section is missing, empty or misplaced.
    ReflectionRuleError: A reflection section appears at step 0.
  """
  return _record_from(_collect(model_output, t, strict=strict, need_action=False), t)


def parse_step_output(model_output: str, t: int, *, strict: bool = True) -> tuple[ReasoningRecord, Action]:
  """Parse the reasoning sections and the action envelope of step ``t``."""
  sections = _collect(model_output, t, strict=strict, need_action=True)
  return _record_from(sections, t), parse_action(sections[ACTION_LABEL])


def render_step_output(record: ReasoningRecord, action: Action) -> str:
  """Render a step in the structured output format; `parse_step_output` inverts it."""
  blocks = [*record.sections().items(), (ACTION_LABEL, serialize_action(action))]
  return "\n".join(f"{_FENCE}{label}\n{content}\n{_FENCE}" for label, content in blocks)


def render_scene(observation: Observation) -> str:
  """Render the full scene descriptor, one JSON element per line."""
  header = f"screen {observation.dims.width}x{observation.dims.height} ({observation.obs_id})"
  if observation.scene is None:
    return f"{header}\n{observation.description}"
  lines = [json.dumps(element.as_dict(), sort_keys=True, ensure_ascii=False) for element in observation.scene]
  return "\n".join([header, *lines]) if lines else f"{header}\n(empty screen)"


def summarize_scene(observation: Observation) -> str:
  """Return the description of a past observation, or a one-line element summary."""
  if observation.description:
    return observation.description
  labels = [f"{element.role} '{element.label}'" for element in observation.scene or ()]
  return f"Screen with {len(labels)} elements: {', '.join(labels)}" if labels else "Empty screen"


SYSTEM_PREAMBLE = (
  "You operate a graphical user interface to accomplish the user's goal. "
  "Coordinates are integers on a 0-1000 grid, origin at the top-left corner."
)

OUTPUT_CONTRACT = (
  "Answer with fenced sections in this order: reflection (omit at step 0: how the previous action's "
  "outcome compares with its expectation), summary (progress so far), planning (next sub-goal), "
  "tactical (the concrete action and its target), expectation (what the screen should show next), "
  'action (one JSON function call {"name": ..., "arguments": {...}}). Each section starts with a line '
  "```label and ends with a line ```."
)


def render_step_prompt(step_input: StepInput) -> list[ChatMessage]:
  """Build the chat messages for one step.

  The system turn describes the action space and output format. Each history step becomes a user
  turn with its observation and an assistant turn with its recorded output. The last user turn
  carries the goal and the full current scene.
  """
  actions = describe_action_space(step_input.action_space)
  messages = [ChatMessage("system", f"{SYSTEM_PREAMBLE}\n\nAvailable actions:\n{actions}\n\n{OUTPUT_CONTRACT}")]
  for offset, step in enumerate(step_input.history):
    t = step_input.history_start + offset
    seen = summarize_scene(step.observation) if step_input.describe_history else render_scene(step.observation)
    messages.extend((
      ChatMessage("user", f"Step {t} observation:\n{seen}"),
      ChatMessage("assistant", render_step_output(step.reasoning, step.action)),
    ))
  current = render_scene(step_input.observation)
  messages.append(ChatMessage("user", f"Goal: {step_input.goal}\nStep {step_input.t} observation:\n{current}"))
  return messages


def step_log_entry(t: int, step: StepRecord, status_after: EpisodeStatus) -> dict[str, Any]:
  """Return the step log encoding of one step."""
  return {
    "t": t,
    "observation": step.observation.as_dict(),
    "reasoning": step.reasoning.as_dict(),
    "action": json.loads(serialize_action(step.action)),
    "status_after": str(status_after),
  }


def write_step_log(path: str | Path, entries: Iterable[Mapping[str, Any]]) -> None:
  """Write step log entries as newline-delimited, key-sorted JSON."""
  with Path(path).open("w", encoding="utf-8") as f:
    for entry in entries:
      f.write(json.dumps(entry, sort_keys=True, ensure_ascii=False) + "\n")


def read_step_log(path: str | Path) -> list[tuple[int, StepRecord, EpisodeStatus]]:
  """Read a step log back into ``(t, step, status_after)`` triples.

  Raises:
    ProtocolError: The file is not UTF-8 or an entry does not decode; the message names the line.
  """
  try:
    text = Path(path).read_text(encoding="utf-8")
  except UnicodeDecodeError as err:
    msg = f"{path} is not valid UTF-8: {err}"
    raise ProtocolError(msg) from None
  out = []
  for number, line in enumerate(text.split("\n"), start=1):
    if not line.strip():
      continue
    try:
      out.append(_decode_step_entry(json.loads(line)))
    except (GuiagError, KeyError, TypeError, ValueError, AttributeError, RecursionError) as err:
      msg = f"{path}:{number}: malformed step log entry: {err!r}"
      raise ProtocolError(msg) from err
  return out


def _decode_step_entry(entry: Mapping[str, Any]) -> tuple[int, StepRecord, EpisodeStatus]:
  step = StepRecord(
    observation=Observation.from_dict(entry["observation"]),
    reasoning=ReasoningRecord.from_dict(entry["reasoning"]),
    action=parse_action(json.dumps(entry["action"])),
  )
  return int(entry["t"]), step, EpisodeStatus(entry["status_after"])
