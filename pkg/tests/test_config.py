from __future__ import annotations

import json
from pathlib import Path

import pytest

from guiag.config import Config, HarnessConfig, SynthesisManifest, config_from_dict, load_config, with_overrides
from guiag.errors import ConfigError


def test_defaults_without_a_file() -> None:
  config = load_config(None)

  assert config == Config()
  assert config.synthesis.endpoint is None
  assert config.harness.on_parse_error == "abort"


def test_load_config_from_json(tmp_path: Path) -> None:
  path = tmp_path / "config.json"
  path.write_text(
    json.dumps({
      "synthesis": {"window_size": 3, "task_kinds": ["stage2_step"], "ratios": {"stage2_step": 0.5}},
      "harness": {"budget": 10, "agent": "random", "failure_rate": 0.1},
    }),
    encoding="utf-8",
  )

  config = load_config(path)

  assert config.synthesis.window_size == 3
  assert config.synthesis.task_kinds == ("stage2_step",)
  assert config.synthesis.ratio("stage2_step") == 0.5
  assert config.synthesis.ratio("next_state_prediction") == 0.0
  assert config.harness == HarnessConfig(budget=10, agent="random", failure_rate=0.1)


@pytest.mark.parametrize(
  ("data", "message"),
  [
    ([], "JSON object"),
    ({"metrics": {}}, "unknown configuration sections"),
    ({"harness": {"budgett": 3}}, "unknown keys"),
    ({"harness": {"budget": "3"}}, "wrong type"),
    ({"harness": {"budget": True}}, "wrong type"),
    ({"harness": {"budget": -1}}, "budget"),
    ({"harness": {"on_parse_error": "retry"}}, "on_parse_error"),
    ({"harness": {"failure_rate": 1.5}}, "failure_rate"),
    ({"synthesis": {"task_kinds": ["stage1_qa"]}}, "unknown synthesis task kinds"),
    ({"synthesis": {"ratios": {"stage2_step": 2.0}}}, "ratio"),
    ({"synthesis": {"window_size": 0}}, "window_size"),
    ({"synthesis": []}, "must be an object"),
  ],
)
def test_invalid_configuration_is_rejected(data: object, message: str) -> None:
  with pytest.raises(ConfigError, match=message):
    config_from_dict(data)


def test_unreadable_file_is_a_config_error(tmp_path: Path) -> None:
  path = tmp_path / "broken.json"
  path.write_text("{not json", encoding="utf-8")

  with pytest.raises(ConfigError, match="cannot read"):
    load_config(path)
  with pytest.raises(ConfigError, match="cannot read"):
    load_config(tmp_path / "missing.json")
  path.write_bytes(b"\xff\xfe{}")
  with pytest.raises(ConfigError, match="cannot read"):
    load_config(path)


def test_overrides() -> None:
  config = Config(synthesis=SynthesisManifest(endpoint="http://localhost:8000/v1", model="m"))

  seeded = with_overrides(config, seed=7)
  stubbed = with_overrides(config, stub=True)
  pointed = with_overrides(Config(), endpoint="http://example.invalid/v1")

  assert seeded.synthesis.seed == 7
  assert seeded.harness.seed == 7
  assert stubbed.synthesis.endpoint is None
  assert stubbed.synthesis.model == "stub"
  assert pointed.synthesis.endpoint == "http://example.invalid/v1"
