"""Stage-2 synthesis: reasoning processes for recorded trajectories.

For every step the synthesizer describes the screen, then builds the reasoning cycle in order:
reflection on the previous expectation, a strategic summary of the history, planning that already
knows the recorded action, tactical reasoning naming that action, and an expectation of the
outcome. The expectation prompt only ever sees the current step, never the next observation.
"""

from __future__ import annotations

import hashlib
import json
import threading
from collections import defaultdict
from dataclasses import dataclass
from typing import TYPE_CHECKING

from cachetools import LRUCache

from guiag.actions import FULL_SPACE, serialize_action
from guiag.errors import GuiagError, ReflectionRuleError, SynthesisError
from guiag.logging import MORE_INFO, get_logger
from guiag.protocol import (
  ChatMessage,
  ReasoningRecord,
  build_step_input,
  new_episode,
  parse_step_output,
  record_step,
  render_scene,
  render_step_output,
  render_step_prompt,
  summarize_scene,
)
from guiag.synthesis.records import SampleSource, SFTSample
from guiag.synthesis.templates import PromptTemplates, load_templates

if TYPE_CHECKING:
  from collections.abc import Iterator, Sequence

  from guiag.actions import Action
  from guiag.protocol import EpisodeState, Observation, StepRecord
  from guiag.synthesis.client import ChatClient
  from guiag.synthesis.records import RawTrajectory

logger = get_logger()

EMPTY_SCREEN = "An empty screen with no visible elements."


@dataclass(frozen=True, slots=True)
class ScreenDescription:
  """Detailed text description of the screen at step ``t``."""

  t: int
  text: str


@dataclass(frozen=True, slots=True)
class StrategicReasoning:
  """Summary of progress and the plan for the next sub-goal."""

  summary: str
  planning: str


def clip(text: str, limit: int) -> str:
  """Collapse whitespace to single spaces and cut at ``limit`` characters."""
  flat = " ".join(text.split())
  return flat if len(flat) <= limit else flat[:limit].rstrip()


def _observation_key(observation: Observation) -> str:
  payload = observation.as_dict()
  payload.pop("description")
  digest = hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()[:16]
  return f"{observation.obs_id}:{digest}"


class ReasoningSynthesizer:
  """Builds stage-2 and next-state samples through a chat client.

  Screen descriptions are cached in an LRU cache keyed by observation. Concurrent requests for the
  same observation compute it once: the first caller holds a per-key lock while the others wait.
  """

  def __init__(
    self,
    client: ChatClient,
    templates: PromptTemplates | None = None,
    *,
    window_size: int = 2,
    max_chars: int = 600,
    max_description_chars: int = 2000,
    cache_size: int = 4096,
  ) -> None:
    """Configure the client, templates, history window and text limits."""
    self.client = client
    self.templates = templates or load_templates()
    self.window_size = window_size
    self.max_chars = max_chars
    self.max_description_chars = max_description_chars
    self._cache: LRUCache[str, str] = LRUCache(maxsize=cache_size)
    self._cache_lock = threading.Lock()
    self._key_locks: defaultdict[str, threading.Lock] = defaultdict(threading.Lock)

  def _complete(self, name: str, limit: int | None = None, **values: object) -> str:
    messages: list[ChatMessage] = self.templates.messages(name, **values)
    text = clip(self.client.complete(messages), limit or self.max_chars)
    if not text:
      msg = f"client returned an empty {name}"
      raise SynthesisError(msg)
    return text

  def _describe_uncached(self, observation: Observation) -> str:
    if observation.scene is None:
      return clip(observation.description or "", self.max_description_chars)
    if not observation.scene:
      return EMPTY_SCREEN
    return self._complete("describe", self.max_description_chars, scene=render_scene(observation))

  def describe_screenshot(self, observation: Observation, t: int = 0) -> ScreenDescription:
    """Describe an observation; repeated calls for the same observation hit the cache."""
    key = _observation_key(observation)
    with self._cache_lock:
      cached = self._cache.get(key)
      if cached is not None:
        return ScreenDescription(t, cached)
      key_lock = self._key_locks[key]
    with key_lock:
      with self._cache_lock:
        cached = self._cache.get(key)
      if cached is None:
        cached = self._describe_uncached(observation)
        with self._cache_lock:
          self._cache[key] = cached
          self._key_locks.pop(key, None)
    return ScreenDescription(t, cached)

  def synth_reflection(self, previous_expectation: str | None, description: ScreenDescription) -> str:
    """Reflect on whether the previous expectation holds on the current screen.

    Raises:
      ReflectionRuleError: At step 0, or without a previous expectation.
    """
    if description.t == 0 or not previous_expectation:
      msg = f"reflection needs a previous expectation (step {description.t})"
      raise ReflectionRuleError(msg)
    return self._complete("reflection", expectation=previous_expectation, description=description.text)

  def synth_strategic(
    self,
    goal: str,
    history: Sequence[StepRecord],
    description: ScreenDescription,
    action: Action,
  ) -> StrategicReasoning:
    """Summarize the history without the current action, then plan with it."""
    lines = [
      f"- {summarize_scene(step.observation)} | action {serialize_action(step.action)}" for step in history
    ]
    summary = self._complete(
      "summary", goal=goal, history="\n".join(lines) or "(no previous steps)", description=description.text
    )
    planning = self._complete(
      "planning", action=serialize_action(action), goal=goal, summary=summary, description=description.text
    )
    return StrategicReasoning(summary=summary, planning=planning)

  def synth_tactical(self, reflection: str | None, strategic: StrategicReasoning, action: Action) -> str:
    """Explain the concrete action; the result always names it."""
    text = self._complete(
      "tactical", action=serialize_action(action), reflection=reflection or "", planning=strategic.planning
    )
    if action.name not in text:
      text = f"{text} Action: {action.name}."
    return text

  def synth_expectation(self, description: ScreenDescription, tactical: str, action: Action) -> str:
    """Predict the outcome of the action from the current step only."""
    return self._complete(
      "expectation", action=serialize_action(action), description=description.text, tactical=tactical
    )

  def iter_step_samples(
    self, trajectory: RawTrajectory, actions: Sequence[Action] | None = None
  ) -> Iterator[SFTSample]:
    """Yield one stage-2 sample per step, in order.

    Each sample is re-parsed before it is yielded. When a step cannot be synthesized the reason is
    logged and the rest of the trajectory is dropped, since later steps depend on its reasoning.
    """
    actions = list(actions) if actions is not None else trajectory.canonical_actions()
    state = new_episode(trajectory.goal, self.window_size, FULL_SPACE, max_steps=len(trajectory) + 1)
    previous_expectation: str | None = None
    for t, (step, action) in enumerate(zip(trajectory.steps, actions, strict=True)):
      try:
        description = self.describe_screenshot(step.observation, t)
        reflection = self.synth_reflection(previous_expectation, description) if t > 0 else None
        strategic = self.synth_strategic(trajectory.goal, state.window(), description, action)
        tactical = self.synth_tactical(reflection, strategic, action)
        expectation = self.synth_expectation(description, tactical, action)
        record = ReasoningRecord(reflection, strategic.summary, strategic.planning, tactical, expectation)
        sample = self._step_sample(trajectory, t, state, step.observation, record, action)
        state = record_step(state, step.observation.with_description(description.text), record, action)
      except GuiagError as err:
        logger.warning("Skipping %s from step %d: %s", trajectory.trajectory_id, t, err)
        return
      previous_expectation = expectation
      logger.log(MORE_INFO, "Synthesized %s step %d", trajectory.trajectory_id, t)
      yield sample
      if state.is_terminal and t + 1 < len(trajectory):
        logger.warning("Trajectory %s ended at step %d before its last step", trajectory.trajectory_id, t)
        return

  def _step_sample(
    self,
    trajectory: RawTrajectory,
    t: int,
    state: EpisodeState,
    observation: Observation,
    record: ReasoningRecord,
    action: Action,
  ) -> SFTSample:
    step_input = build_step_input(state, observation)
    output = render_step_output(record, action)
    if parse_step_output(output, t) != (record, action):
      msg = f"step {t} of {trajectory.trajectory_id} does not survive a parse round trip"
      raise SynthesisError(msg)
    messages = (*render_step_prompt(step_input), ChatMessage("assistant", output))
    return SFTSample(
      messages=messages,
      source=SampleSource(dataset=trajectory.dialect, trajectory=trajectory.trajectory_id, step=t),
      task_kind="stage2_step",
    )

  def build_step_sample(self, trajectory: RawTrajectory, t: int) -> SFTSample:
    """Return the stage-2 sample of step ``t``.

    Raises:
      IndexError: ``t`` is outside the trajectory.
      SynthesisError: Step ``t`` could not be synthesized.
    """
    if not 0 <= t < len(trajectory):
      msg = f"step {t} outside trajectory of length {len(trajectory)}"
      raise IndexError(msg)
    for sample in self.iter_step_samples(trajectory):
      if sample.source.step == t:
        return sample
    msg = f"step {t} of {trajectory.trajectory_id} was skipped"
    raise SynthesisError(msg)

  def build_next_state_sample(
    self, trajectory: RawTrajectory, t: int, actions: Sequence[Action] | None = None
  ) -> SFTSample:
    """Return a sample that predicts the description of step ``t + 1`` from step ``t`` and its action.

    Raises:
      IndexError: ``t`` is the last step or outside the trajectory.
    """
    if not 0 <= t < len(trajectory) - 1:
      msg = f"no next state after step {t} of a {len(trajectory)}-step trajectory"
      raise IndexError(msg)
    action = actions[t] if actions is not None else trajectory.canonical_actions()[t]
    current = self.describe_screenshot(trajectory.steps[t].observation, t)
    following = self.describe_screenshot(trajectory.steps[t + 1].observation, t + 1)
    prompt = self.templates.messages("next_state", description=current.text, action=serialize_action(action))
    return SFTSample(
      messages=(*prompt, ChatMessage("assistant", following.text)),
      source=SampleSource(dataset=trajectory.dialect, trajectory=trajectory.trajectory_id, step=t),
      task_kind="next_state_prediction",
    )
