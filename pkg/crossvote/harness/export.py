"""Result persistence: CSVs, radar JSON, traces, decision logs and run directories."""
import hashlib
import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Union

import pandas as pd

from crossvote.analysis.alignment import decisions_frame
from crossvote.scoring.metrics import cumulative_series

from .episode import NO_VOTE_RULE, EpisodeLog
from .sweep import SweepResult, aggregate

logger = logging.getLogger(__name__)

PER_SEED_CSV = "per_seed.csv"
AGGREGATE_CSV = "aggregate.csv"
RADAR_JSON = "radar.json"
DECISIONS_CSV = "decisions.csv"
EFFECTIVE_CONFIG_JSON = "effective_config.json"

PathLike = Union[str, Path]


def _ensure_parent(path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")


# ---------------------------------------------------------------------------
# Run directories
# ---------------------------------------------------------------------------

def config_hash(effective: Mapping[str, Any]) -> str:
    payload = json.dumps(effective, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:10]


def run_dir_name(effective: Mapping[str, Any], now: Optional[datetime] = None) -> str:
    """`<UTC timestamp>-<config hash>`."""
    now = now or datetime.now(timezone.utc)
    return f"{now.strftime('%Y%m%dT%H%M%SZ')}-{config_hash(effective)}"


def write_effective_config(effective: Mapping[str, Any], run_dir: PathLike) -> Path:
    path = _ensure_parent(Path(run_dir) / EFFECTIVE_CONFIG_JSON)
    path.write_text(json.dumps(effective, sort_keys=True, indent=2, default=str) + "\n", encoding="utf-8")
    return path


# ---------------------------------------------------------------------------
# Sweeps
# ---------------------------------------------------------------------------

def policy_label(policy: str, vote_rule: str) -> str:
    return policy if vote_rule in (NO_VOTE_RULE, "", None) else f"{policy}-{vote_rule}"


def radar_records(table: pd.DataFrame) -> Dict[str, Dict[str, Dict[str, float]]]:
    """{scenario → {policy label → {speed, stops, wait}}} from the aggregate means."""
    multi_split = table["preference_split"].nunique() > 1
    records: Dict[str, Dict[str, Dict[str, float]]] = {}
    for _, row in table.iterrows():
        label = policy_label(row["policy"], row["vote_rule"])
        if multi_split:
            label = f"{label}@{float(row['preference_split'])!r}"
        records.setdefault(row["scenario"], {})[label] = {
            "speed": float(row["mean_speed_mean"]),
            "stops": float(row["total_stops_mean"]),
            "wait": float(row["mean_wait_mean"]),
        }
    return records


def emit_radar_data(sweep: SweepResult, path: PathLike) -> Path:
    if sweep.aggregate.empty:
        raise ValueError("cannot emit radar data for an empty sweep")
    path = _ensure_parent(path)
    text = json.dumps(radar_records(sweep.aggregate), sort_keys=True, indent=2)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def write_sweep(sweep: SweepResult, run_dir: PathLike) -> Dict[str, Path]:
    """Per-seed CSV, aggregate CSV, radar JSON and (when kept) multi decisions."""
    run_dir = Path(run_dir)
    run_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "per_seed": run_dir / PER_SEED_CSV,
        "aggregate": run_dir / AGGREGATE_CSV,
    }
    sweep.per_seed.to_csv(paths["per_seed"], index=False)
    sweep.aggregate.to_csv(paths["aggregate"], index=False)
    paths["radar"] = emit_radar_data(sweep, run_dir / RADAR_JSON)
    if sweep.decisions is not None and not sweep.decisions.empty:
        paths["decisions"] = save_decision_log(sweep.decisions, run_dir / DECISIONS_CSV)
    for name, p in paths.items():
        logger.info("wrote %s: %s", name, p)
    return paths


def read_sweep(run_dir: PathLike) -> SweepResult:
    run_dir = Path(run_dir)
    per_seed_path = run_dir / PER_SEED_CSV
    if not per_seed_path.is_file():
        raise FileNotFoundError(f"no sweep results in {run_dir} (missing {PER_SEED_CSV})")
    per_seed = read_csv(per_seed_path)
    aggregate_path = run_dir / AGGREGATE_CSV
    if aggregate_path.is_file():
        agg = read_csv(aggregate_path)
    else:
        agg = aggregate(per_seed)
    decisions_path = run_dir / DECISIONS_CSV
    decisions = load_decision_log(decisions_path) if decisions_path.is_file() else None
    return SweepResult(per_seed=per_seed, aggregate=agg, decisions=decisions,
                       seeds=sorted(per_seed["seed"].unique().tolist()))


# ---------------------------------------------------------------------------
# Traces and decision logs
# ---------------------------------------------------------------------------

def trace_frame(log: EpisodeLog) -> pd.DataFrame:
    tel = log.telemetry
    if tel is None:
        raise ValueError("episode log carries no telemetry")
    series = cumulative_series(tel)
    return pd.DataFrame({
        "clock": tel.clock,
        "phase": tel.phase,
        "ns_mean_speed": series["ns_mean_speed_mps"],
        "we_mean_speed": series["we_mean_speed_mps"],
        "cumulative_stops": series["cumulative_stops"],
        "cumulative_wait": series["cumulative_wait_s"],
    })


def export_trace_csv(log: EpisodeLog, path: PathLike) -> Path:
    """One row per simulated second."""
    path = _ensure_parent(path)
    trace_frame(log).to_csv(path, index=False)
    return path


def save_decision_log(logs: Union[pd.DataFrame, Sequence[EpisodeLog]], path: PathLike) -> Path:
    frame = logs if isinstance(logs, pd.DataFrame) else decisions_frame(logs)
    path = _ensure_parent(path)
    frame.to_csv(path, index=False)
    return path


def load_decision_log(path: PathLike) -> pd.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"decision log not found: {path}")
    frame = read_csv(path)
    frame["vote_rule"] = frame["vote_rule"].astype(str)
    frame["scenario"] = frame["scenario"].astype(str)
    return frame


def write_training_curve(curve: Sequence[Mapping[str, Any]], path: PathLike) -> Path:
    path = _ensure_parent(path)
    columns = ["episode", "demand", "return", "mean_loss", "epsilon", "updates"]
    pd.DataFrame(list(curve), columns=columns).to_csv(path, index=False)
    return path
