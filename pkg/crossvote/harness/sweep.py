"""Demand × seed × policy sweeps with per-seed rows and mean/std aggregates."""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import pandas as pd
from tqdm import tqdm

from crossvote.analysis.alignment import decision_rows
from crossvote.analysis.policy import PolicyConfig, build_policy
from crossvote.config.scenarios import DEMANDS
from crossvote.errors import ConfigError
from crossvote.neural.mlp import Mlp
from crossvote.sim.constants import PREFERENCE_SPLIT
from crossvote.sim.models import ScenarioConfig

from .episode import NO_VOTE_RULE, run_episode

logger = logging.getLogger(__name__)

KEY_COLUMNS = ["scenario", "policy", "vote_rule", "preference_split"]
METRIC_COLUMNS = [
    "mean_speed", "total_stops", "mean_wait", "switch_rate",
    "ns_mean_speed", "we_mean_speed", "ns_total_stops", "we_total_stops",
    "ns_mean_wait", "we_mean_wait",
]
PER_SEED_COLUMNS = ["scenario", "seed", "policy", "vote_rule", "preference_split"] + METRIC_COLUMNS

DemandsLike = Union[Sequence[str], Mapping[str, Tuple[int, int]]]


@dataclass(frozen=True)
class SweepJob:
    base: ScenarioConfig
    scenario: str
    n_ns: int
    n_we: int
    preference_split: float
    seed: int
    policy: PolicyConfig
    nets: Dict[str, Mlp]
    keep_decisions: bool = False


@dataclass
class SweepResult:
    per_seed: pd.DataFrame
    aggregate: pd.DataFrame
    decisions: Optional[pd.DataFrame] = None
    seeds: List[int] = field(default_factory=list)

    @property
    def n_seeds(self) -> int:
        return len(self.seeds)

    def __len__(self) -> int:
        return len(self.per_seed)


# ---------------------------------------------------------------------------
# Jobs
# ---------------------------------------------------------------------------

def resolve_demands(demands: Optional[DemandsLike]) -> Dict[str, Tuple[int, int]]:
    if demands is None:
        return dict(DEMANDS)
    if isinstance(demands, Mapping):
        return {k: (int(v[0]), int(v[1])) for k, v in demands.items()}
    resolved = {}
    for demand_id in demands:
        if demand_id not in DEMANDS:
            raise ConfigError(f"unknown demand id {demand_id!r}; expected one of {', '.join(DEMANDS)}")
        resolved[demand_id] = DEMANDS[demand_id]
    return resolved


def resolve_seeds(seeds: Union[int, Iterable[int]]) -> List[int]:
    """An int N means seeds 1..N."""
    if isinstance(seeds, int):
        if seeds < 1:
            raise ConfigError("at least one seed is required")
        return list(range(1, seeds + 1))
    out = [int(s) for s in seeds]
    if not out:
        raise ConfigError("at least one seed is required")
    return out


def run_job(job: SweepJob) -> Tuple[Dict[str, Any], Optional[List[Dict[str, Any]]]]:
    """Run one episode and reduce it to a per-seed metrics row."""
    cfg = job.base.replace(n_ns=job.n_ns, n_we=job.n_we, seed=job.seed,
                           preference_split=job.preference_split)
    log = run_episode(cfg, build_policy(job.policy, job.nets), scenario=job.scenario)
    report = log.metrics()
    row = {
        "scenario": job.scenario,
        "seed": job.seed,
        "policy": job.policy.policy,
        "vote_rule": job.policy.vote_rule or NO_VOTE_RULE,
        "preference_split": job.preference_split,
        "mean_speed": report.mean_speed_mps,
        "total_stops": report.total_stops,
        "mean_wait": report.mean_wait_s,
        "switch_rate": log.switch_rate,
        "ns_mean_speed": report.ns_mean_speed_mps,
        "we_mean_speed": report.we_mean_speed_mps,
        "ns_total_stops": report.ns_total_stops,
        "we_total_stops": report.we_total_stops,
        "ns_mean_wait": report.ns_mean_wait_s,
        "we_mean_wait": report.we_mean_wait_s,
    }
    decisions = decision_rows(log) if job.keep_decisions else None
    return row, decisions


def _execute(jobs: List[SweepJob], parallel: int, progress: bool):
    if parallel <= 1:
        yield from tqdm(map(run_job, jobs), total=len(jobs), desc="sweep", disable=not progress)
        return
    chunksize = max(1, len(jobs) // (parallel * 4))
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        yield from tqdm(pool.map(run_job, jobs, chunksize=chunksize), total=len(jobs),
                        desc="sweep", disable=not progress)


# ---------------------------------------------------------------------------
# Aggregation
# ---------------------------------------------------------------------------

def aggregate(per_seed: pd.DataFrame) -> pd.DataFrame:
    """Mean and population std (ddof=0) of every metric per (scenario, policy, rule, split)."""
    rows = []
    for keys, group in per_seed.groupby(KEY_COLUMNS, sort=False):
        row = dict(zip(KEY_COLUMNS, keys))
        for m in METRIC_COLUMNS:
            row[f"{m}_mean"] = float(group[m].mean())
            row[f"{m}_std"] = float(group[m].std(ddof=0))
        row["seeds"] = len(group)
        rows.append(row)
    columns = KEY_COLUMNS + [f"{m}_{s}" for m in METRIC_COLUMNS for s in ("mean", "std")] + ["seeds"]
    return pd.DataFrame(rows, columns=columns)


def run_sweep(demands: Optional[DemandsLike], seeds: Union[int, Iterable[int]],
              policies: Sequence[PolicyConfig], nets: Mapping[str, Mlp],
              base: Optional[ScenarioConfig] = None,
              splits: Sequence[float] = (PREFERENCE_SPLIT,),
              parallel: int = 1, keep_decisions: bool = False,
              progress: bool = False) -> SweepResult:
    """
    Every (demand, split, policy, seed) combination as an independent
    episode. Each episode depends only on its own seed, so parallel and
    serial runs return identical frames.
    """
    if not policies:
        raise ConfigError("at least one policy is required")
    base = base if base is not None else ScenarioConfig()
    demand_map = resolve_demands(demands)
    seed_list = resolve_seeds(seeds)
    net_map = dict(nets)

    jobs = [
        SweepJob(base=base, scenario=scenario, n_ns=n_ns, n_we=n_we, preference_split=float(split),
                 seed=seed, policy=policy, nets=net_map,
                 keep_decisions=keep_decisions and policy.policy == "multi")
        for scenario, (n_ns, n_we) in demand_map.items()
        for split in splits
        for policy in policies
        for seed in seed_list
    ]
    logger.info("sweep: %d demands x %d splits x %d policies x %d seeds = %d episodes (parallel=%d)",
                len(demand_map), len(splits), len(policies), len(seed_list), len(jobs), parallel)

    rows, decision_rows_all = [], []
    for row, decisions in _execute(jobs, parallel, progress):
        rows.append(row)
        if decisions:
            decision_rows_all.extend(decisions)

    per_seed = pd.DataFrame(rows, columns=PER_SEED_COLUMNS)
    decisions_df = pd.DataFrame(decision_rows_all) if keep_decisions else None
    return SweepResult(per_seed=per_seed, aggregate=aggregate(per_seed),
                       decisions=decisions_df, seeds=seed_list)


def run_preference_sweep(demands: Optional[DemandsLike], seeds: Union[int, Iterable[int]],
                         splits: Sequence[float], policies: Sequence[PolicyConfig],
                         nets: Mapping[str, Mlp], **kwargs) -> SweepResult:
    """Sweep over the share of vehicles preferring fewer stops."""
    for s in splits:
        if not 0.0 <= float(s) <= 1.0:
            raise ConfigError(f"preference split {s} outside [0, 1]")
    return run_sweep(demands, seeds, policies, nets, splits=tuple(splits), **kwargs)
