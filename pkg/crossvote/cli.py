"""Command-line entry point: train / run / sweep / align / report."""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from crossvote.analysis.alignment import alignment_analysis
from crossvote.analysis.policy import PolicyConfig, build_policy, required_nets
from crossvote.config.loader import build_model, parse_overrides, read_config_file, split_by_model
from crossvote.config.scenarios import DEMANDS, POLICY_IDS, REWARD_IDS, VOTE_RULES
from crossvote.config.settings import settings
from crossvote.errors import ConfigError, CrossvoteError
from crossvote.harness.episode import run_episode
from crossvote.harness.export import (
    export_trace_csv, load_decision_log, read_csv, read_sweep, run_dir_name,
    save_decision_log, write_effective_config, write_sweep, write_training_curve,
)
from crossvote.harness.report import acceptance_report, compare_vote_rules
from crossvote.harness.sweep import resolve_demands, resolve_seeds, run_preference_sweep, run_sweep
from crossvote.neural.checkpoint import load_checkpoint, save_checkpoint
from crossvote.neural.dqn import Hyperparams, train_dqn
from crossvote.scoring.rewards import RewardParams, reward_params_for
from crossvote.sim.models import ScenarioConfig

logger = logging.getLogger("crossvote")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2

AGREEMENT_CSV = "agreement.csv"
VOTE_RULES_CSV = "vote_rules.csv"
ACCEPTANCE_MD = "acceptance.md"

CONFIG_MODELS = {
    "scenario": ScenarioConfig,
    "hyper": Hyperparams,
    "reward": RewardParams,
    "policy": PolicyConfig,
}


class UsageError(Exception):
    """Bad command-line usage; maps to exit code 1."""


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with code 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _csv_list(text: Optional[str]) -> Optional[List[str]]:
    if text is None:
        return None
    return [part.strip() for part in text.split(",") if part.strip()]


# ---------------------------------------------------------------------------
# Effective configuration
# ---------------------------------------------------------------------------

def resolve_models(args: argparse.Namespace) -> Dict[str, Any]:
    """Config file, then --set overrides, then explicit flags."""
    values: Dict[str, Any] = {}
    if args.config:
        values.update(read_config_file(args.config))
    values.update(parse_overrides(args.set or []))
    routed = split_by_model(values, CONFIG_MODELS)

    seed = getattr(args, "seed", None)
    if seed is not None:
        routed["scenario"]["seed"] = seed
        routed["hyper"]["seed"] = seed
    episodes = getattr(args, "episodes", None)
    if episodes is not None:
        routed["hyper"]["train_episodes"] = episodes
    policy = getattr(args, "policy", None)
    if policy is not None:
        routed["policy"]["policy"] = policy
    vote_rule = getattr(args, "vote_rule", None)
    if vote_rule is not None and "," not in vote_rule:
        routed["policy"]["vote_rule"] = vote_rule

    scenario = build_model(ScenarioConfig, routed["scenario"])
    hyper = build_model(Hyperparams, routed["hyper"])
    reward = routed["reward"]
    if {"max_stops_norm", "max_wait_norm"} <= set(reward):
        reward_params = build_model(RewardParams, reward)
    else:
        try:
            reward_params = reward_params_for(scenario, **{k: float(v) for k, v in reward.items()
                                                          if k in ("alpha", "beta")})
        except ValueError as e:
            raise ConfigError(f"invalid RewardParams: {e}") from e
    return {
        "scenario": scenario,
        "hyper": hyper,
        "reward": reward_params,
        "explicit_norms": {"max_stops_norm", "max_wait_norm"} <= set(reward),
        "policy_values": routed["policy"],
    }


def _policy_configs(args: argparse.Namespace, base: Dict[str, Any]) -> List[PolicyConfig]:
    ids = _csv_list(getattr(args, "policies", None)) or [base.get("policy") or getattr(args, "policy", None) or "multi"]
    rules = _csv_list(getattr(args, "vote_rule", None)) or ([base["vote_rule"]] if base.get("vote_rule") else [])
    temperature = base.get("temperature", 1.0)
    configs = []
    for pid in ids:
        if pid == "multi":
            if not rules:
                raise ConfigError("policy 'multi' requires --vote-rule")
            configs.extend(build_model(PolicyConfig, {"policy": pid, "vote_rule": r, "temperature": temperature})
                           for r in rules)
        else:
            configs.append(build_model(PolicyConfig, {"policy": pid, "temperature": temperature}))
    return configs


def print_effective_config(command: str, effective: Dict[str, Any]) -> None:
    print("=" * 60)
    print(f"crossvote {command} - effective config")
    print("=" * 60)
    print(json.dumps(effective, sort_keys=True, indent=2, default=str))
    print("=" * 60)


def _out_root(args: argparse.Namespace) -> Path:
    return Path(args.out) if args.out else settings.OUT


def _checkpoint_dir(args: argparse.Namespace) -> Path:
    if getattr(args, "checkpoints", None):
        return Path(args.checkpoints)
    return settings.checkpoint_dir(_out_root(args))


def _run_dir(args: argparse.Namespace, effective: Dict[str, Any]) -> Path:
    if getattr(args, "run_dir", None):
        return Path(args.run_dir)
    return _out_root(args) / run_dir_name(effective)


def _load_nets(names: Sequence[str], ckpt_dir: Path):
    return {name: load_checkpoint(ckpt_dir / f"{name}.ckpt") for name in names}


def _progress() -> bool:
    return sys.stderr.isatty()


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_train(args: argparse.Namespace) -> int:
    models = resolve_models(args)
    ckpt_dir = _checkpoint_dir(args)
    effective = {
        "command": "train",
        "reward": args.reward,
        "scenario": models["scenario"].model_dump(),
        "hyperparams": models["hyper"].model_dump(),
        "reward_params": (models["reward"].model_dump() if models["explicit_norms"]
                          else {"alpha": models["reward"].alpha, "beta": models["reward"].beta,
                                "norms": "per-episode fleet"}),
        "checkpoints": str(ckpt_dir),
    }
    print_effective_config("train", effective)

    result = train_dqn(models["scenario"], args.reward, models["hyper"],
                       reward_params=models["reward"] if models["explicit_norms"] else None,
                       alpha=models["reward"].alpha, beta=models["reward"].beta,
                       progress=_progress())
    ckpt = save_checkpoint(result.net, ckpt_dir / f"{args.reward}.ckpt")
    curve = write_training_curve(result.curve, ckpt_dir / f"{args.reward}_curve.csv")
    (ckpt_dir / f"{args.reward}_config.json").write_text(
        json.dumps(effective, sort_keys=True, indent=2, default=str) + "\n", encoding="utf-8")
    print(f">>> checkpoint: {ckpt}")
    print(f">>> training curve: {curve}")
    return EXIT_OK


def cmd_run(args: argparse.Namespace) -> int:
    models = resolve_models(args)
    scenario = models["scenario"]
    demand_ids = _csv_list(args.demands)
    if demand_ids:
        if len(demand_ids) != 1:
            raise UsageError("run takes a single demand id")
        demand_id = demand_ids[0]
        n_ns, n_we = resolve_demands(demand_ids)[demand_id]
        scenario = scenario.replace(n_ns=n_ns, n_we=n_we)
    else:
        demand_id = None

    policy_cfg = _policy_configs(args, models["policy_values"])
    if len(policy_cfg) != 1:
        raise UsageError("run takes a single policy and vote rule")
    policy_cfg = policy_cfg[0]
    ckpt_dir = _checkpoint_dir(args)
    effective = {
        "command": "run",
        "scenario": scenario.model_dump(),
        "policy": policy_cfg.model_dump(),
        "checkpoints": str(ckpt_dir),
    }
    print_effective_config("run", effective)
    run_dir = _run_dir(args, effective)

    nets = _load_nets(required_nets([policy_cfg]), ckpt_dir)
    log = run_episode(scenario, build_policy(policy_cfg, nets), scenario=demand_id)
    report = log.metrics()

    write_effective_config(effective, run_dir)
    export_trace_csv(log, run_dir / "trace.csv")
    save_decision_log([log], run_dir / "decisions.csv")
    row = {"scenario": log.scenario, "seed": log.seed, "policy": policy_cfg.policy,
           "vote_rule": log.vote_rule, "switch_rate": log.switch_rate, **report.to_dict()}
    pd.DataFrame([row]).to_csv(run_dir / "metrics.csv", index=False)

    print(f">>> {log.scenario} seed={log.seed} policy={policy_cfg.label}: "
          f"speed={report.mean_speed_mps:.2f} m/s stops={report.total_stops} "
          f"wait={report.mean_wait_s:.1f} s switch={log.switch_rate:.3f}")
    print(f">>> results: {run_dir}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    models = resolve_models(args)
    policies = _policy_configs(args, models["policy_values"])
    demand_map = resolve_demands(_csv_list(args.demands))
    seeds = resolve_seeds(args.seeds)
    splits = [float(s) for s in (_csv_list(args.splits) or [models["scenario"].preference_split])]
    parallel = args.parallel if args.parallel is not None else settings.PARALLEL
    ckpt_dir = _checkpoint_dir(args)

    effective = {
        "command": "sweep",
        "scenario": models["scenario"].model_dump(exclude={"n_ns", "n_we", "seed", "preference_split"}),
        "demands": demand_map,
        "seeds": seeds,
        "splits": splits,
        "policies": [p.model_dump() for p in policies],
        "checkpoints": str(ckpt_dir),
    }
    print_effective_config("sweep", effective)
    run_dir = _run_dir(args, effective)

    nets = _load_nets(required_nets(policies), ckpt_dir)
    kwargs = dict(base=models["scenario"], parallel=parallel, keep_decisions=True, progress=_progress())
    if len(splits) > 1:
        sweep = run_preference_sweep(demand_map, seeds, splits, policies, nets, **kwargs)
    else:
        sweep = run_sweep(demand_map, seeds, policies, nets, splits=splits, **kwargs)

    write_effective_config(effective, run_dir)
    paths = write_sweep(sweep, run_dir)
    print(f">>> {len(sweep)} episodes, {len(sweep.aggregate)} aggregate rows")
    for name, p in paths.items():
        print(f">>> {name}: {p}")
    return EXIT_OK


def cmd_align(args: argparse.Namespace) -> int:
    models = resolve_models(args)
    temperature = float(models["policy_values"].get("temperature", 1.0))
    if args.logs:
        logs_path = Path(args.logs)
    elif args.run_dir:
        logs_path = Path(args.run_dir) / "decisions.csv"
    else:
        raise UsageError("align needs --logs or --run-dir")
    ckpt_dir = _checkpoint_dir(args)
    effective = {
        "command": "align",
        "logs": str(logs_path),
        "checkpoints": str(ckpt_dir),
        "temperature": temperature,
    }
    print_effective_config("align", effective)

    if not logs_path.is_file():
        raise FileNotFoundError(f"decision log not found: {logs_path}")
    frame = load_decision_log(logs_path)
    nets = _load_nets(["stops", "wait"], ckpt_dir)
    agreement = alignment_analysis(frame, nets, temperature=temperature)

    run_dir = Path(args.run_dir) if args.run_dir else logs_path.parent
    out = run_dir / AGREEMENT_CSV
    out.parent.mkdir(parents=True, exist_ok=True)
    agreement.to_csv(out, index=False)
    print(f">>> agreement: {out}")
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    if not args.run_dir:
        raise UsageError("report needs --run-dir")
    models = resolve_models(args)
    run_dir = Path(args.run_dir)
    effective = {
        "command": "report",
        "run_dir": str(run_dir),
        "horizon_steps": models["scenario"].horizon_steps,
    }
    print_effective_config("report", effective)

    sweep = read_sweep(run_dir)
    agreement_path = run_dir / AGREEMENT_CSV
    agreement = read_csv(agreement_path) if agreement_path.is_file() else None

    compare_vote_rules(sweep).to_csv(run_dir / VOTE_RULES_CSV, index=False)
    report = acceptance_report(sweep, agreement, horizon_steps=models["scenario"].horizon_steps)
    (run_dir / ACCEPTANCE_MD).write_text(report.markdown + "\n", encoding="utf-8")
    for name, verdict in report.verdicts.items():
        print(f"  {name:<14} {verdict}")
    print(f">>> report: {run_dir / ACCEPTANCE_MD}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> CliParser:
    common = CliParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config key (repeatable)")
    common.add_argument("--out", help="output root (default: $CROSSVOTE_OUT or ./runs)")
    common.add_argument("--checkpoints", help="checkpoint directory (default: <out>/checkpoints)")

    parser = CliParser(prog="crossvote", description="Voting-integrated multi-objective DQN signal control")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", parents=[common], help="train one Q-network on one reward")
    p.add_argument("--reward", required=True, choices=REWARD_IDS)
    p.add_argument("--seed", type=int)
    p.add_argument("--episodes", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("run", parents=[common], help="run one evaluation episode")
    p.add_argument("--policy", choices=POLICY_IDS)
    p.add_argument("--vote-rule", choices=VOTE_RULES)
    p.add_argument("--seed", type=int)
    p.add_argument("--demands", help=f"one demand id ({', '.join(DEMANDS)})")
    p.add_argument("--run-dir", help="write results here instead of a new run directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", parents=[common], help="demand x seed x policy sweep")
    p.add_argument("--policy", choices=POLICY_IDS)
    p.add_argument("--policies", help="comma list of policy ids")
    p.add_argument("--vote-rule", help="vote rule, or a comma list for several multi variants")
    p.add_argument("--seeds", type=int, default=10, help="number of seeds, run as 1..N")
    p.add_argument("--demands", help="comma list of demand ids (default: all six)")
    p.add_argument("--splits", help="comma list of Stops-preference shares")
    p.add_argument("--parallel", type=int, help="worker processes (default: $CROSSVOTE_PARALLEL)")
    p.add_argument("--run-dir", help="write results here instead of a new run directory")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("align", parents=[common], help="action agreement of the multi policy's decisions")
    p.add_argument("--logs", help="decision log CSV (default: <run-dir>/decisions.csv)")
    p.add_argument("--run-dir", help="sweep run directory")
    p.set_defaults(func=cmd_align)

    p = sub.add_parser("report", parents=[common], help="vote-rule comparison and acceptance summary")
    p.add_argument("--run-dir", help="sweep run directory")
    p.set_defaults(func=cmd_report)
    return parser


def _validate(parser: CliParser, args: argparse.Namespace) -> None:
    if args.command == "sweep":
        if args.policies:
            bad = [p for p in _csv_list(args.policies) if p not in POLICY_IDS]
            if bad:
                parser.error(f"unknown policy id(s): {', '.join(bad)}")
        if args.vote_rule:
            bad = [r for r in _csv_list(args.vote_rule) if r not in VOTE_RULES]
            if bad:
                parser.error(f"unknown vote rule(s): {', '.join(bad)}")
        if args.seeds < 1:
            parser.error("--seeds must be at least 1")
        if args.parallel is not None and args.parallel < 1:
            parser.error("--parallel must be at least 1")
    if getattr(args, "episodes", None) is not None and args.episodes < 0:
        parser.error("--episodes must be non-negative")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    logging.basicConfig(
        level=getattr(logging, str(settings.LOG_LEVEL).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (UsageError, ConfigError) as e:
        print(f"crossvote {args.command}: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (CrossvoteError, OSError, ValueError) as e:
        logger.debug("command failed", exc_info=True)
        print(f"crossvote {args.command}: error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
