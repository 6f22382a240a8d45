"""Action agreement between the greedy single-objective policies and the multi policy.

Every logged decision of the multi policy is replayed through each
candidate policy; the agreement of two policies is the fraction of those
decisions on which they pick the same action.
"""
import logging
from typing import Any, Dict, List, Mapping, Sequence, Union

import numpy as np
import pandas as pd

from crossvote.config.scenarios import DEMAND_BUCKETS, OBJECTIVES, bucket_of
from crossvote.errors import DimensionError
from crossvote.neural.mlp import Mlp
from crossvote.sim.models import VoteTally

from .policy import greedy_action, integrated_action

logger = logging.getLogger(__name__)

ALIGNED_POLICIES = ("stops-greedy", "wait-greedy", "multi")
OTHER_BUCKET = "other"


# ---------------------------------------------------------------------------
# Decision frames
# ---------------------------------------------------------------------------

def decision_rows(log: Any) -> List[Dict[str, Any]]:
    """Flatten an episode log's decision records into one dict per decision."""
    rows = []
    for k, rec in enumerate(log.records):
        row: Dict[str, Any] = {
            "scenario": log.scenario,
            "seed": log.seed,
            "policy": log.policy,
            "vote_rule": log.vote_rule,
            "preference_split": log.preference_split,
            "decision": k,
            "clock": rec.clock,
            "incumbent": rec.incumbent,
        }
        for i, x in enumerate(rec.obs):
            row[f"obs_{i}"] = float(x)
        row["votes_stops"] = rec.votes_stops
        row["votes_wait"] = rec.votes_wait
        row["stops_share"] = VoteTally(rec.votes_stops, rec.votes_wait).stops_share
        for obj, w in rec.weights.items():
            row[f"w_{obj}"] = float(w)
        for obj, q in rec.q.items():
            for a, x in enumerate(q):
                row[f"q_{obj}_{a}"] = float(x)
        for a, x in enumerate(rec.q_integrated):
            row[f"q_int_{a}"] = float(x)
        row["action"] = rec.action
        rows.append(row)
    return rows


def decisions_frame(logs: Sequence[Any]) -> pd.DataFrame:
    rows: List[Dict[str, Any]] = []
    for log in logs:
        rows.extend(decision_rows(log))
    return pd.DataFrame(rows)


def obs_columns(frame: pd.DataFrame) -> List[str]:
    cols = [c for c in frame.columns if c.startswith("obs_")]
    return sorted(cols, key=lambda c: int(c.split("_")[1]))


# ---------------------------------------------------------------------------
# Agreement
# ---------------------------------------------------------------------------

def _bucket(scenario: str) -> str:
    try:
        return bucket_of(scenario)
    except KeyError:
        return OTHER_BUCKET


def _replay_actions(group: pd.DataFrame, nets: Mapping[str, Mlp], temperature: float) -> Dict[str, np.ndarray]:
    obs = group[obs_columns(group)].to_numpy(dtype=np.float64)
    incumbents = group["incumbent"].to_numpy(dtype=np.int64)
    weights = group[[f"w_{k}" for k in OBJECTIVES]].to_numpy(dtype=np.float64)
    fused = {k: nets[k] for k in OBJECTIVES}

    actions = {name: np.empty(len(group), dtype=np.int64) for name in ALIGNED_POLICIES}
    for i in range(len(group)):
        inc = int(incumbents[i])
        actions["stops-greedy"][i] = greedy_action(nets["stops"], obs[i], inc, temperature)
        actions["wait-greedy"][i] = greedy_action(nets["wait"], obs[i], inc, temperature)
        w = {k: float(weights[i, j]) for j, k in enumerate(OBJECTIVES)}
        actions["multi"][i] = integrated_action(fused, obs[i], w, inc, temperature)
    return actions


def alignment_analysis(logs: Union[pd.DataFrame, Sequence[Any]], nets: Mapping[str, Mlp],
                       temperature: float = 1.0) -> pd.DataFrame:
    """
    Agreement of every ordered pair among stops-greedy, wait-greedy and
    multi, per vote rule and demand bucket. Returns long-form rows
    (vote_rule, bucket, policy_a, policy_b, agreement, decisions).
    """
    frame = logs if isinstance(logs, pd.DataFrame) else decisions_frame(logs)
    if "policy" in frame.columns:
        frame = frame[frame["policy"] == "multi"]
    if frame.empty:
        raise ValueError("no multi-policy decisions to replay")

    cols = obs_columns(frame)
    for name in OBJECTIVES:
        if name not in nets:
            raise DimensionError(f"alignment needs a {name!r} net")
        if nets[name].input_dim != len(cols):
            raise DimensionError(
                f"{name} net expects {nets[name].input_dim} inputs, logs hold {len(cols)} observation columns"
            )

    frame = frame.assign(bucket=frame["scenario"].map(_bucket))
    bucket_order = list(DEMAND_BUCKETS) + [OTHER_BUCKET]
    rows = []
    for rule in sorted(frame["vote_rule"].unique()):
        for bucket in bucket_order:
            group = frame[(frame["vote_rule"] == rule) & (frame["bucket"] == bucket)]
            if group.empty:
                continue
            actions = _replay_actions(group, nets, temperature)
            logger.debug("replayed %d decisions for %s/%s", len(group), rule, bucket)
            for a in ALIGNED_POLICIES:
                for b in ALIGNED_POLICIES:
                    agree = 1.0 if a == b else float(np.mean(actions[a] == actions[b]))
                    rows.append({
                        "vote_rule": rule, "bucket": bucket, "policy_a": a, "policy_b": b,
                        "agreement": agree, "decisions": len(group),
                    })
    return pd.DataFrame(rows, columns=["vote_rule", "bucket", "policy_a", "policy_b", "agreement", "decisions"])


def agreement_matrix(agreement: pd.DataFrame, vote_rule: str, bucket: str) -> pd.DataFrame:
    """3×3 matrix view of one (vote_rule, bucket) block."""
    block = agreement[(agreement["vote_rule"] == vote_rule) & (agreement["bucket"] == bucket)]
    matrix = block.pivot(index="policy_a", columns="policy_b", values="agreement")
    return matrix.reindex(index=list(ALIGNED_POLICIES), columns=list(ALIGNED_POLICIES))
