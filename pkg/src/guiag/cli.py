"""Package CLI entrypoint."""

from __future__ import annotations

import json
from argparse import ArgumentDefaultsHelpFormatter, ArgumentParser, Namespace
from functools import partial
from pathlib import Path
from typing import TYPE_CHECKING, Any

from tqdm import tqdm

from guiag.agents import BaseAgent, ChatAgent, GroundingOracleAgent, OracleAgent, RandomAgent
from guiag.config import Config, load_config, with_overrides
from guiag.env import MockEnv, StochasticMockEnv, all_tasks, find_task, oracle_agent
from guiag.episode import EpisodeStatistics, format_success_table, run_episode
from guiag.errors import ConfigError, GuiagError
from guiag.fixtures import write_fixtures
from guiag.grounding import eval_grounding, load_suite
from guiag.logging import get_logger, set_verbosity
from guiag.parallel import ParallelWorkerManager
from guiag.replay import replay_step_log
from guiag.synthesis import make_client, run_stage1, run_stage2, validate_corpus, write_corpus
from guiag.synthesis.records import load_trajectories
from guiag.synthesis.standardize import load_records

if TYPE_CHECKING:
  from collections.abc import Sequence

  from guiag.episode import EpisodeResult

logger = get_logger()

EPISODE_AGENTS = ("oracle", "random", "chat")
LOG_LEVELS = ("DEBUG", "MORE_INFO", "INFO", "WARNING", "ERROR")
GROUNDING_AGENTS = ("grounding_oracle", "random", "chat")


def write_report(path: str | None, report: dict[str, Any]) -> None:
  """Write a key-sorted JSON report, or print it when no path is given."""
  text = json.dumps(report, indent=2, sort_keys=True)
  if path is None:
    print(text)
    return
  target = Path(path)
  target.parent.mkdir(parents=True, exist_ok=True)
  target.write_text(text + "\n", encoding="utf-8")
  logger.info("Report written to %s", target)


def standardize(config: Config, input_path: str, output_path: str, refine: bool = False) -> None:
  """Standardize raw stage-1 records into a corpus."""
  records = load_records(input_path)
  client = make_client(config.synthesis) if refine else None
  samples = run_stage1(records, client=client)
  count = write_corpus(output_path, samples)
  logger.info("Wrote %d of %d records to %s", count, len(records), output_path)


def synth(config: Config, input_path: str, output_path: str) -> None:
  """Synthesize stage-2 reasoning samples for a trajectory file."""
  trajectories = load_trajectories(input_path)
  samples = run_stage2(trajectories, make_client(config.synthesis), config.synthesis)
  count = write_corpus(output_path, samples)
  logger.info("Wrote %d samples to %s", count, output_path)


def grounding(config: Config, suite_path: str, agent_name: str, report_path: str | None) -> None:
  """Evaluate an agent on a grounding suite and report accuracy per platform and element type."""
  cases = load_suite(suite_path)
  agent: BaseAgent
  if agent_name == "grounding_oracle":
    agent = GroundingOracleAgent({case.case_id: case.gold for case in cases})
  elif agent_name == "random":
    agent = RandomAgent(config.harness.seed)
  else:
    agent = ChatAgent(make_client(config.synthesis))
  # the random agent draws from one generator, so it runs sequentially
  workers = 1 if agent_name == "random" else config.harness.max_workers
  report = eval_grounding(cases, agent, max_workers=workers)
  agent.close()
  logger.info("\n%s", report.format_table(str(agent)))
  write_report(report_path, {"agent": str(agent), **report.as_dict()})


def _episode_agent(config: Config, agent_name: str, task_id: str) -> BaseAgent:
  if agent_name == "oracle":
    script, _ = find_task(task_id)
    return OracleAgent(oracle_agent(script, task_id))
  if agent_name == "random":
    return RandomAgent([config.harness.seed, sum(task_id.encode("utf-8"))])
  return ChatAgent(make_client(config.synthesis))


def _play_task(task_id: str, config: Config, agent_name: str, log_dir: str | None) -> EpisodeResult:
  script, _ = find_task(task_id)
  harness = config.harness
  env = MockEnv(script) if harness.failure_rate == 0 else StochasticMockEnv(script, harness.failure_rate, harness.seed)
  agent = _episode_agent(config, agent_name, task_id)
  step_log = None
  if log_dir is not None:
    Path(log_dir).mkdir(parents=True, exist_ok=True)
    step_log = Path(log_dir, f"{task_id}.ndjson")
  result = run_episode(
    env,
    task_id,
    agent,
    harness.budget,
    window_size=harness.window_size,
    on_parse_error=harness.on_parse_error,
    step_log=step_log,
  )
  agent.close()
  return result


def run_episodes(
  config: Config,
  agent_name: str,
  task_ids: Sequence[str] | None,
  report_path: str | None,
  log_dir: str | None,
) -> None:
  """Play every requested task once and report success rates by difficulty."""
  tasks = list(task_ids) if task_ids else [task.task_id for _, task in all_tasks()]
  worker = partial(_play_task, config=config, agent_name=agent_name, log_dir=log_dir)
  with tqdm(total=len(tasks), desc="Episodes", unit="task") as pbar:
    results = []
    for result in ParallelWorkerManager.execute_parallel_work(worker, tasks, config.harness.max_workers):
      results.append(result)
      pbar.update(1)
  stats = EpisodeStatistics(tuple(results))
  logger.info("\n%s", format_success_table([(agent_name, stats.as_dict()["success_rate"])]))
  write_report(report_path, {"agent": agent_name, **stats.as_dict()})


def validate(path: str) -> bool:
  """Validate a corpus file and print the report; return whether it is clean."""
  report = validate_corpus(path)
  for problem in report.problems:
    logger.warning("%s", problem)
  write_report(None, report.as_dict())
  return report.ok


def replay(log_path: str, task_id: str) -> bool:
  """Replay a step log and print the report; return whether it matched."""
  report = replay_step_log(log_path, task_id)
  write_report(None, report.as_dict())
  return report.ok


def build_parser() -> ArgumentParser:
  """Create the argument parser with all subcommands."""
  parser = ArgumentParser(description="GUI agent toolkit", formatter_class=ArgumentDefaultsHelpFormatter)
  parser.add_argument("--config", type=str, default=None, help="JSON configuration file")
  parser.add_argument("--seed", type=int, default=None, help="Override the configured seed")
  parser.add_argument("--endpoint", type=str, default=None, help="OpenAI-compatible chat endpoint URL")
  parser.add_argument("--stub", action="store_true", help="Use the deterministic offline chat client")
  parser.add_argument("--log-level", choices=LOG_LEVELS, default=None, help="Logging level (default: MORE_INFO)")
  subparsers = parser.add_subparsers(dest="command", help="Available commands")

  standardize_parser = subparsers.add_parser("standardize", help="Standardize raw stage-1 records")
  standardize_parser.add_argument("input", type=str, help="NDJSON file of raw records")
  standardize_parser.add_argument("output", type=str, help="Output corpus file")
  standardize_parser.add_argument(
    "--refine", action="store_true", help="Reformulate responses with the chat client (also set by synthesis.refine)"
  )

  synth_parser = subparsers.add_parser("synth", help="Synthesize stage-2 reasoning samples")
  synth_parser.add_argument("input", type=str, help="NDJSON file of trajectories")
  synth_parser.add_argument("output", type=str, help="Output corpus file")

  grounding_parser = subparsers.add_parser("eval-grounding", help="Evaluate grounding accuracy")
  grounding_parser.add_argument("suite", type=str, help="NDJSON grounding suite")
  grounding_parser.add_argument("--agent", choices=GROUNDING_AGENTS, default="grounding_oracle", help="Agent")
  grounding_parser.add_argument("--report", type=str, default=None, help="JSON report path")

  episodes_parser = subparsers.add_parser("run-episodes", help="Run mock-environment episodes")
  episodes_parser.add_argument("--agent", choices=EPISODE_AGENTS, default=None, help="Agent (default from config)")
  episodes_parser.add_argument("--tasks", nargs="*", default=None, help="Task ids (default: all bundled tasks)")
  episodes_parser.add_argument("--report", type=str, default=None, help="JSON report path")
  episodes_parser.add_argument("--log-dir", type=str, default=None, help="Directory for per-task step logs")

  validate_parser = subparsers.add_parser("validate-corpus", help="Check every sample of a corpus")
  validate_parser.add_argument("corpus", type=str, help="Corpus file")

  fixtures_parser = subparsers.add_parser("make-fixtures", help="Write the bundled corpora")
  fixtures_parser.add_argument("out_dir", type=str, help="Output directory")

  replay_parser = subparsers.add_parser("replay", help="Re-run a step log and report divergence")
  replay_parser.add_argument("log", type=str, help="Step log file")
  replay_parser.add_argument("--task", type=str, required=True, help="Task id the log was recorded on")
  return parser


def dispatch(args: Namespace, config: Config) -> bool:
  """Run the selected command; return False when it found problems."""
  match args.command:
    case "standardize":
      standardize(config, args.input, args.output, refine=args.refine or config.synthesis.refine)
    case "synth":
      synth(config, args.input, args.output)
    case "eval-grounding":
      grounding(config, args.suite, args.agent, args.report)
    case "run-episodes":
      agent_name = args.agent or config.harness.agent
      if agent_name not in EPISODE_AGENTS:
        msg = f"unknown episode agent {agent_name!r}; choose from {', '.join(EPISODE_AGENTS)}"
        raise ConfigError(msg)
      run_episodes(config, agent_name, args.tasks, args.report, args.log_dir)
    case "validate-corpus":
      return validate(args.corpus)
    case "make-fixtures":
      write_fixtures(args.out_dir, seed=config.harness.seed)
    case "replay":
      return replay(args.log, args.task)
  return True


def main(argv: Sequence[str] | None = None) -> int:
  """Run the CLI entrypoint.

  Returns:
    0 on success, 1 on an evaluation or data error, 2 on a configuration error.
  """
  parser = build_parser()
  args = parser.parse_args(argv)
  if args.command is None:
    parser.print_help()
    return 0
  if args.log_level is not None:
    set_verbosity(args.log_level)
  try:
    config = with_overrides(load_config(args.config), seed=args.seed, endpoint=args.endpoint, stub=args.stub)
    ok = dispatch(args, config)
  except ConfigError as err:
    logger.error("Configuration error: %s", err)  # noqa: TRY400
    return 2
  except (GuiagError, OSError) as err:
    logger.error("%s failed: %s", args.command, err)  # noqa: TRY400
    return 1
  return 0 if ok else 1


if __name__ == "__main__":
  raise SystemExit(main())
