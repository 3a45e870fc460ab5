from __future__ import annotations

import json
from pathlib import Path

import pytest

from guiag.agents import OracleAgent
from guiag.env import AppScript, MockEnv, oracle_agent
from guiag.episode import run_episode
from guiag.errors import ProtocolError
from guiag.replay import replay_step_log


def _record(settings_app: AppScript, path: Path) -> list[dict]:
  agent = OracleAgent(oracle_agent(settings_app, "turn_off_wifi"))
  run_episode(MockEnv(settings_app), "turn_off_wifi", agent, 30, step_log=path)
  return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines()]


def _rewrite(path: Path, entries: list[dict]) -> None:
  path.write_text("".join(json.dumps(entry, sort_keys=True) + "\n" for entry in entries), encoding="utf-8")


def test_replay_of_a_recorded_episode_matches(settings_app: AppScript, tmp_path: Path) -> None:
  path = tmp_path / "wifi.ndjson"
  entries = _record(settings_app, path)

  report = replay_step_log(path, "turn_off_wifi")

  assert report.ok
  assert report.steps == len(entries)
  assert report.as_dict()["divergent_step"] is None


def test_replay_reports_the_first_divergent_observation(settings_app: AppScript, tmp_path: Path) -> None:
  path = tmp_path / "wifi.ndjson"
  entries = _record(settings_app, path)
  entries[0]["action"] = {"name": "tap", "arguments": {"point": {"x": 500, "y": 900}}}
  _rewrite(path, entries)

  report = replay_step_log(path, "turn_off_wifi")

  assert not report.ok
  assert report.divergent_step == 1
  assert report.divergence is not None
  assert "settings_main@1" in report.divergence


def test_replay_reports_a_premature_end(settings_app: AppScript, tmp_path: Path) -> None:
  path = tmp_path / "wifi.ndjson"
  entries = _record(settings_app, path)
  entries[0]["status_after"] = "complete"
  _rewrite(path, entries)

  report = replay_step_log(path, "turn_off_wifi")

  assert report.divergent_step == 0
  assert report.divergence == "environment done=False but log says complete"


def test_malformed_step_log_entry_names_its_line(settings_app: AppScript, tmp_path: Path) -> None:
  path = tmp_path / "wifi.ndjson"
  entries = _record(settings_app, path)
  del entries[1]["reasoning"]
  _rewrite(path, entries)

  with pytest.raises(ProtocolError, match=r"wifi\.ndjson:2: malformed step log entry"):
    replay_step_log(path, "turn_off_wifi")
