"""Step log replay: re-run a recorded episode and report where it diverges."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Any

from guiag.env import MockEnv, find_task
from guiag.logging import get_logger
from guiag.protocol import EpisodeStatus, read_step_log

if TYPE_CHECKING:
  from pathlib import Path

  from guiag.protocol import Observation

logger = get_logger()


@dataclass(frozen=True, slots=True)
class ReplayReport:
  """Outcome of a replay; ``divergence`` is None when every step matched."""

  task_id: str
  steps: int
  divergent_step: int | None = None
  divergence: str | None = None

  @property
  def ok(self) -> bool:
    """Return whether the replay matched the log."""
    return self.divergence is None

  def as_dict(self) -> dict[str, Any]:
    """Return the report encoding."""
    return {
      "task_id": self.task_id,
      "steps": self.steps,
      "divergent_step": self.divergent_step,
      "divergence": self.divergence,
      "ok": self.ok,
    }


def _scene_key(observation: Observation) -> dict[str, Any]:
  data = observation.as_dict()
  data.pop("description", None)
  return data


def replay_step_log(path: str | Path, task_id: str) -> ReplayReport:
  """Re-execute the actions of a step log on a fresh environment.

  Each logged observation must equal the one the environment produces at that step, and the
  episode must end where the log says it ended.
  """
  script, _ = find_task(task_id)
  env = MockEnv(script)
  observation = env.reset(task_id)
  entries = read_step_log(path)
  for t, step, status_after in entries:
    if _scene_key(step.observation) != _scene_key(observation):
      msg = f"observation {observation.obs_id} differs from logged {step.observation.obs_id}"
      logger.warning("Replay of %s diverges at step %d: %s", task_id, t, msg)
      return ReplayReport(task_id, len(entries), t, msg)
    outcome = env.step(step.action)
    observation = outcome.observation
    terminal = status_after in {EpisodeStatus.COMPLETE, EpisodeStatus.INFEASIBLE}
    if outcome.done != terminal:
      msg = f"environment done={outcome.done} but log says {status_after}"
      logger.warning("Replay of %s diverges at step %d: %s", task_id, t, msg)
      return ReplayReport(task_id, len(entries), t, msg)
  logger.info("Replayed %d steps of %s without divergence", len(entries), task_id)
  return ReplayReport(task_id, len(entries))
