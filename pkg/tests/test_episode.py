from __future__ import annotations

from pathlib import Path

import pytest

from guiag.actions import Action
from guiag.agents import BaseAgent, OracleAgent, RandomAgent
from guiag.agents.base import scripted_output
from guiag.env import AppScript, MockEnv, all_tasks, find_task, oracle_agent
from guiag.episode import EpisodeResult, EpisodeStatistics, format_success_table, run_episode, success_rate
from guiag.errors import EpisodeConfigError
from guiag.geometry import NormPoint
from guiag.protocol import StepInput, read_step_log


class MumblingAgent(BaseAgent):
  def act(self, step_input: StepInput) -> str:
    return "I am not sure what to do here."


class HoveringAgent(BaseAgent):
  def act(self, step_input: StepInput) -> str:
    return scripted_output(step_input, Action("hover", point=NormPoint(500, 500)))


def _result(difficulty: str, success: bool, steps: int = 3, task_id: str = "t") -> EpisodeResult:
  status = "complete" if success else "exhausted"
  return EpisodeResult(task_id, difficulty, success, steps, status)


@pytest.mark.parametrize("task_id", [task.task_id for _, task in all_tasks()])
def test_oracle_agent_succeeds_on_every_task(task_id: str) -> None:
  script, task = find_task(task_id)

  result = run_episode(MockEnv(script), task_id, OracleAgent(oracle_agent(script, task_id)), 30)

  assert result.success
  assert result.status == task.expected_status
  assert result.steps == len(oracle_agent(script, task_id))
  assert result.parse_misses == 0


def test_random_agent_stays_within_budget(settings_app: AppScript) -> None:
  result = run_episode(MockEnv(settings_app), "turn_off_wifi", RandomAgent(seed=3), 5)

  assert result.steps <= 5
  assert result.parse_misses == 0
  assert result.status in {"complete", "infeasible", "exhausted"}


def test_zero_budget_is_exhausted_without_steps(settings_app: AppScript) -> None:
  result = run_episode(MockEnv(settings_app), "turn_off_wifi", RandomAgent(seed=0), 0)

  assert result == EpisodeResult("turn_off_wifi", "easy", False, 0, "exhausted", "RandomAgent")


def test_unparseable_output_aborts_by_default(settings_app: AppScript) -> None:
  result = run_episode(MockEnv(settings_app), "turn_off_wifi", MumblingAgent(), 5)

  assert result.status == "aborted"
  assert result.steps == 1
  assert result.parse_misses == 1
  assert not result.success


def test_skip_policy_spends_budget_on_misses(settings_app: AppScript) -> None:
  result = run_episode(MockEnv(settings_app), "turn_off_wifi", MumblingAgent(), 3, on_parse_error="skip")

  assert result.status == "exhausted"
  assert result.steps == 3
  assert result.parse_misses == 3


def test_action_outside_app_space_is_a_parse_miss(settings_app: AppScript) -> None:
  result = run_episode(MockEnv(settings_app), "turn_off_wifi", HoveringAgent(), 5)

  assert result.status == "aborted"
  assert result.parse_misses == 1


def test_unknown_parse_error_policy(settings_app: AppScript) -> None:
  with pytest.raises(EpisodeConfigError):
    run_episode(MockEnv(settings_app), "turn_off_wifi", MumblingAgent(), 3, on_parse_error="retry")


def test_episode_writes_a_step_log(settings_app: AppScript, tmp_path: Path) -> None:
  path = tmp_path / "wifi.ndjson"
  agent = OracleAgent(oracle_agent(settings_app, "turn_off_wifi"))

  result = run_episode(MockEnv(settings_app), "turn_off_wifi", agent, 30, step_log=path)
  entries = read_step_log(path)

  assert [t for t, _, _ in entries] == list(range(result.steps))
  assert str(entries[-1][2]) == "complete"
  assert entries[0][1].reasoning.reflection is None
  assert all(step.reasoning.reflection for _, step, _ in entries[1:])


def test_success_rate_by_difficulty() -> None:
  results = [_result("easy", True), _result("easy", False), _result("hard", False), _result("hard", False)]

  rates = success_rate(results)

  assert rates == {"easy": 0.5, "middle": None, "hard": 0.0, "overall": 0.25}


def test_success_rate_of_nothing() -> None:
  assert success_rate([]) == {"easy": None, "middle": None, "hard": None, "overall": None}


def test_success_rate_by_other_attribute() -> None:
  results = [_result("easy", True), _result("hard", False)]

  assert success_rate(results, group_by="status") == {"complete": 1.0, "exhausted": 0.0, "overall": 0.5}


def test_episode_statistics_report() -> None:
  stats = EpisodeStatistics((_result("hard", False, 4, "b"), _result("easy", True, 2, "a")))

  report = stats.as_dict()

  assert report["episodes"] == 2
  assert report["successes"] == 1
  assert report["avg_steps"] == 3.0
  assert report["status_counts"] == {"complete": 1, "exhausted": 1}
  assert [row["task_id"] for row in report["results"]] == ["a", "b"]


def test_format_success_table() -> None:
  table = format_success_table([("oracle", {"easy": 0.5, "middle": None, "hard": 0.0, "overall": 0.25})])

  assert table.splitlines() == [
    "Agent   Easy  Middle  Hard  Overall",
    "oracle  0.50  -       0.00  0.25",
  ]


def test_episode_result_round_trip() -> None:
  result = EpisodeResult("turn_off_wifi", "easy", True, 3, "complete", "OracleAgent", 1)

  assert EpisodeResult.from_dict(result.as_dict()) == result
  assert str(result) == "turn_off_wifi (easy): success, complete after 3 steps - OracleAgent"


def test_success_rate_of_a_mixed_batch() -> None:
  results = [
    *(_result("easy", success) for success in (True, True, True, False)),
    *(_result("middle", success) for success in (True, False, False)),
    *(_result("hard", False) for _ in range(3)),
  ]

  rates = success_rate(results)

  assert rates["easy"] == 0.75
  assert rates["middle"] == pytest.approx(1 / 3)
  assert rates["hard"] == 0.0
  assert rates["overall"] == 0.4


def test_random_agent_falls_short_of_the_oracle() -> None:
  results = []
  for script, task in all_tasks():
    agent = RandomAgent(seed=[0, sum(task.task_id.encode("utf-8"))])
    results.append(run_episode(MockEnv(script), task.task_id, agent, 10))

  rates = success_rate(results)

  assert rates["overall"] is not None
  assert rates["overall"] < 1.0
  assert all(result.steps <= 10 for result in results)
