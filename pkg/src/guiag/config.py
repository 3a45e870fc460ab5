"""Runtime configuration: synthesis manifest and harness settings, loaded from JSON."""

from __future__ import annotations

import dataclasses
import json
import types
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Union, get_args, get_origin, get_type_hints

from guiag.errors import ConfigError

STAGE2_TASK_KINDS = ("stage2_step", "next_state_prediction")
PARSE_ERROR_POLICIES = ("abort", "skip")


@dataclass(frozen=True, slots=True)
class SynthesisManifest:
  """Settings of the synthesis pipeline.

  ``ratios`` is the probability that a step contributes a sample of each enabled task kind; it is
  drawn from a generator seeded with ``seed`` and the trajectory id.
  """

  endpoint: str | None = None
  model: str = "stub"
  templates_version: str = "v1"
  window_size: int = 2
  task_kinds: tuple[str, ...] = STAGE2_TASK_KINDS
  ratios: dict[str, float] = field(default_factory=lambda: dict.fromkeys(STAGE2_TASK_KINDS, 1.0))
  seed: int = 0
  refine: bool = False
  max_chars: int = 600
  timeout: float = 60.0
  max_retries: int = 2
  max_workers: int | None = None

  def __post_init__(self) -> None:
    """Check task kinds, ratios and the history window."""
    unknown = sorted(set(self.task_kinds) - set(STAGE2_TASK_KINDS))
    if unknown:
      msg = f"unknown synthesis task kinds: {', '.join(unknown)}"
      raise ConfigError(msg)
    for kind, ratio in self.ratios.items():
      if kind not in STAGE2_TASK_KINDS or not 0.0 <= ratio <= 1.0:
        msg = f"ratio for {kind!r} must be a known task kind in [0, 1], got {ratio}"
        raise ConfigError(msg)
    if self.window_size < 1:
      msg = f"window_size must be at least 1, got {self.window_size}"
      raise ConfigError(msg)

  def ratio(self, task_kind: str) -> float:
    """Return the sampling ratio of an enabled task kind, 0 for disabled ones."""
    if task_kind not in self.task_kinds:
      return 0.0
    return self.ratios.get(task_kind, 1.0)


@dataclass(frozen=True, slots=True)
class HarnessConfig:
  """Settings of the evaluation harness."""

  budget: int = 30
  window_size: int = 2
  on_parse_error: str = "abort"
  agent: str = "oracle"
  failure_rate: float = 0.0
  seed: int = 0
  max_workers: int | None = None

  def __post_init__(self) -> None:
    """Check the budget, window and parse-error policy."""
    if self.budget < 0:
      msg = f"budget must not be negative, got {self.budget}"
      raise ConfigError(msg)
    if self.window_size < 1:
      msg = f"window_size must be at least 1, got {self.window_size}"
      raise ConfigError(msg)
    if self.on_parse_error not in PARSE_ERROR_POLICIES:
      msg = f"on_parse_error must be one of {PARSE_ERROR_POLICIES}, got {self.on_parse_error!r}"
      raise ConfigError(msg)
    if not 0.0 <= self.failure_rate <= 1.0:
      msg = f"failure_rate must be in [0, 1], got {self.failure_rate}"
      raise ConfigError(msg)


@dataclass(frozen=True, slots=True)
class Config:
  """Complete runtime configuration."""

  synthesis: SynthesisManifest = field(default_factory=SynthesisManifest)
  harness: HarnessConfig = field(default_factory=HarnessConfig)


def _matches(value: Any, hint: Any) -> bool:
  origin = get_origin(hint)
  if origin in {Union, types.UnionType}:
    return any(_matches(value, arg) for arg in get_args(hint))
  if hint is type(None):
    return value is None
  if origin is tuple:
    (item, _) = get_args(hint)
    return isinstance(value, list | tuple) and all(_matches(v, item) for v in value)
  if origin is dict:
    key_hint, value_hint = get_args(hint)
    return isinstance(value, dict) and all(_matches(k, key_hint) and _matches(v, value_hint) for k, v in value.items())
  if hint is float:
    return isinstance(value, int | float) and not isinstance(value, bool)
  if hint is int:
    return isinstance(value, int) and not isinstance(value, bool)
  return isinstance(value, hint)


def _section[T](cls: type[T], data: Any, name: str) -> T:
  if not isinstance(data, dict):
    msg = f"section {name!r} must be an object"
    raise ConfigError(msg)
  hints = get_type_hints(cls)
  known = {f.name for f in dataclasses.fields(cls)}
  unknown = sorted(set(data) - known)
  if unknown:
    msg = f"unknown keys in {name!r}: {', '.join(unknown)}"
    raise ConfigError(msg)
  values = {}
  for key, value in data.items():
    if not _matches(value, hints[key]):
      msg = f"{name}.{key} has the wrong type: {value!r}"
      raise ConfigError(msg)
    values[key] = tuple(value) if isinstance(value, list) else value
  return cls(**values)


def config_from_dict(data: Any) -> Config:
  """Build a configuration from decoded JSON.

  Raises:
    ConfigError: Unknown keys, wrong types or out-of-range values.
  """
  if not isinstance(data, dict):
    msg = "configuration must be a JSON object"
    raise ConfigError(msg)
  unknown = sorted(set(data) - {"synthesis", "harness"})
  if unknown:
    msg = f"unknown configuration sections: {', '.join(unknown)}"
    raise ConfigError(msg)
  return Config(
    synthesis=_section(SynthesisManifest, data.get("synthesis", {}), "synthesis"),
    harness=_section(HarnessConfig, data.get("harness", {}), "harness"),
  )


def load_config(path: str | Path | None = None) -> Config:
  """Load a configuration file, or the defaults when ``path`` is None.

  Raises:
    ConfigError: The file cannot be read or is invalid.
  """
  if path is None:
    return Config()
  try:
    with Path(path).open(encoding="utf-8") as f:
      data = json.load(f)
  except (OSError, ValueError, RecursionError) as err:
    msg = f"cannot read configuration {path}: {err}"
    raise ConfigError(msg) from err
  return config_from_dict(data)


def with_overrides(
  config: Config, *, seed: int | None = None, endpoint: str | None = None, stub: bool = False
) -> Config:
  """Apply command-line overrides; ``stub`` forces the offline client."""
  synthesis = config.synthesis
  harness = config.harness
  if seed is not None:
    synthesis = dataclasses.replace(synthesis, seed=seed)
    harness = dataclasses.replace(harness, seed=seed)
  if endpoint is not None:
    synthesis = dataclasses.replace(synthesis, endpoint=endpoint)
  if stub:
    synthesis = dataclasses.replace(synthesis, endpoint=None, model="stub")
  return Config(synthesis=synthesis, harness=harness)
