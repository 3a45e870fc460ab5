"""Input trajectories and output training samples of the synthesis pipeline."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Any

from guiag.actions import Action, unify_action
from guiag.errors import GuiagError, SynthesisError
from guiag.protocol import ChatMessage, Observation

if TYPE_CHECKING:
  from collections.abc import Callable, Iterable, Iterator, Mapping

  from guiag.actions import UnificationTable

TASK_KINDS = ("stage1_grounding", "stage1_qa", "stage1_understanding", "stage2_step", "next_state_prediction")
STAGE1_KINDS = TASK_KINDS[:3]
STAGE2_KINDS = TASK_KINDS[3:]


@dataclass(frozen=True, slots=True)
class RawStep:
  """One recorded step: what was on screen and what the demonstrator did, in its own dialect."""

  observation: Observation
  action_name: str
  action_args: dict[str, Any] = field(default_factory=dict)
  annotation: str | None = None

  def as_dict(self) -> dict[str, Any]:
    """Return the JSON encoding."""
    return {
      "observation": self.observation.as_dict(),
      "action": {"name": self.action_name, "arguments": self.action_args},
      "annotation": self.annotation,
    }

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> RawStep:
    """Decode the JSON encoding."""
    action = data["action"]
    return cls(
      observation=Observation.from_dict(data["observation"]),
      action_name=action["name"],
      action_args=dict(action.get("arguments", {})),
      annotation=data.get("annotation"),
    )


@dataclass(frozen=True, slots=True)
class RawTrajectory:
  """A demonstration of one goal, as recorded by some dataset."""

  dialect: str
  trajectory_id: str
  goal: str
  steps: tuple[RawStep, ...]
  app: str | None = None

  def __post_init__(self) -> None:
    """A trajectory needs at least one step."""
    if not self.steps:
      msg = f"trajectory {self.trajectory_id} has no steps"
      raise SynthesisError(msg)

  def __len__(self) -> int:
    """Return the number of steps."""
    return len(self.steps)

  def canonical_actions(self, table: UnificationTable | None = None) -> list[Action]:
    """Unify every step's action onto the canonical action space."""
    return [
      unify_action(step.action_name, step.action_args, self.dialect, dims=step.observation.dims, table=table)
      for step in self.steps
    ]

  def as_dict(self) -> dict[str, Any]:
    """Return the JSON encoding."""
    return {
      "dialect": self.dialect,
      "id": self.trajectory_id,
      "goal": self.goal,
      "app": self.app,
      "steps": [step.as_dict() for step in self.steps],
    }

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> RawTrajectory:
    """Decode the JSON encoding."""
    return cls(
      dialect=data["dialect"],
      trajectory_id=str(data["id"]),
      goal=data["goal"],
      steps=tuple(RawStep.from_dict(step) for step in data["steps"]),
      app=data.get("app"),
    )


@dataclass(frozen=True, slots=True, order=True)
class SampleSource:
  """Provenance of a sample: dataset, trajectory (or record) id and step."""

  dataset: str
  trajectory: str
  step: int = 0

  def as_dict(self) -> dict[str, Any]:
    """Return the JSON encoding."""
    return {"dataset": self.dataset, "trajectory": self.trajectory, "step": self.step}


@dataclass(frozen=True, slots=True)
class SFTSample:
  """One supervised fine-tuning sample."""

  messages: tuple[ChatMessage, ...]
  source: SampleSource
  task_kind: str

  def __post_init__(self) -> None:
    """The last turn must be the assistant's and the task kind must be known."""
    if self.task_kind not in TASK_KINDS:
      msg = f"unknown task kind {self.task_kind!r}"
      raise SynthesisError(msg)
    if not self.messages or self.messages[-1].role != "assistant":
      msg = f"sample {self.source} must end with an assistant turn"
      raise SynthesisError(msg)

  @property
  def response(self) -> str:
    """Return the assistant turn."""
    return self.messages[-1].content

  def as_dict(self) -> dict[str, Any]:
    """Return the JSON encoding."""
    return {
      "messages": [message.as_dict() for message in self.messages],
      "source": self.source.as_dict(),
      "task_kind": self.task_kind,
    }

  @classmethod
  def from_dict(cls, data: Mapping[str, Any]) -> SFTSample:
    """Decode the JSON encoding."""
    try:
      return cls(
        messages=tuple(ChatMessage(message["role"], message["content"]) for message in data["messages"]),
        source=SampleSource(**data["source"]),
        task_kind=data["task_kind"],
      )
    except (KeyError, TypeError) as err:
      msg = f"malformed sample: {err!r}"
      raise SynthesisError(msg) from err


def sample_sort_key(sample: SFTSample) -> tuple[SampleSource, str]:
  """Order samples by provenance, then task kind."""
  return sample.source, sample.task_kind


def write_ndjson(path: str | Path, rows: Iterable[Mapping[str, Any]]) -> int:
  """Write key-sorted JSON lines and return how many were written."""
  count = 0
  target = Path(path)
  target.parent.mkdir(parents=True, exist_ok=True)
  with target.open("w", encoding="utf-8") as f:
    for row in rows:
      f.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")
      count += 1
  return count


def iter_ndjson(path: str | Path) -> Iterator[tuple[int, dict[str, Any]]]:
  """Yield ``(line number, object)`` for every non-blank line.

  Raises:
    SynthesisError: The file is not UTF-8, or a line is not a JSON object.
  """
  with Path(path).open(encoding="utf-8") as f:
    try:
      for number, line in enumerate(f, start=1):
        if not line.strip():
          continue
        try:
          row = json.loads(line)
        except (ValueError, RecursionError) as err:
          msg = f"{path}:{number}: not valid JSON: {err}"
          raise SynthesisError(msg) from None
        if not isinstance(row, dict):
          msg = f"{path}:{number}: expected a JSON object, got {type(row).__name__}"
          raise SynthesisError(msg)
        yield number, row
    except UnicodeDecodeError as err:
      msg = f"{path} is not valid UTF-8: {err}"
      raise SynthesisError(msg) from None


def read_ndjson(path: str | Path) -> list[dict[str, Any]]:
  """Read non-blank JSON lines."""
  return [row for _, row in iter_ndjson(path)]


def load_rows[T](
  path: str | Path,
  decode: Callable[[dict[str, Any]], T],
  kind: str,
  error: type[GuiagError] = SynthesisError,
) -> list[T]:
  """Decode every line of an NDJSON file, naming the first line that does not decode.

  Raises:
    SynthesisError: The file itself is malformed.
    GuiagError: ``error`` for a row with missing or invalid fields.
  """
  out = []
  for number, row in iter_ndjson(path):
    try:
      out.append(decode(row))
    except (GuiagError, KeyError, TypeError, ValueError, AttributeError) as err:
      msg = f"{path}:{number}: malformed {kind}: {err!r}"
      raise error(msg) from err
  return out


def load_trajectories(path: str | Path) -> list[RawTrajectory]:
  """Load trajectories from an NDJSON file."""
  return load_rows(path, RawTrajectory.from_dict, "trajectory")
