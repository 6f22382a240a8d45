"""Vote-rule comparison and the markdown acceptance summary of a sweep."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import pandas as pd

from crossvote.config.scenarios import DEMAND_BUCKETS, DEMANDS
from crossvote.sim.constants import HORIZON_STEPS, PREFERENCE_SPLIT

from .sweep import SweepResult

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"

STOPS_DEMAND = "medium_unbalanced"
WAIT_DEMAND = "medium_balanced"


@dataclass
class AcceptanceReport:
    markdown: str
    verdicts: Dict[str, str] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(v != FAIL for v in self.verdicts.values())


def _default_split(table: pd.DataFrame) -> pd.DataFrame:
    """Restrict to the half-half preference split when several were swept."""
    if table["preference_split"].nunique() <= 1:
        return table
    return table[table["preference_split"] == PREFERENCE_SPLIT]


def _row(table: pd.DataFrame, scenario: str, policy: str, vote_rule: Optional[str] = None) -> Optional[pd.Series]:
    mask = (table["scenario"] == scenario) & (table["policy"] == policy)
    if vote_rule is not None:
        mask &= table["vote_rule"] == vote_rule
    rows = table[mask]
    return None if rows.empty else rows.iloc[0]


def _fmt(x: float) -> str:
    return f"{x:.2f}"


# ---------------------------------------------------------------------------
# Vote-rule comparison
# ---------------------------------------------------------------------------

def compare_vote_rules(sweep: SweepResult) -> pd.DataFrame:
    """
    Proportional vs majority per demand. Proportional counts as dominated
    only when it is worse on both stops and wait by more than one std.
    """
    table = _default_split(sweep.aggregate)
    rows = []
    for scenario in table["scenario"].unique():
        prop = _row(table, scenario, "multi", "proportional")
        maj = _row(table, scenario, "multi", "majority")
        if prop is None or maj is None:
            continue
        tol_stops = max(prop["total_stops_std"], maj["total_stops_std"])
        tol_wait = max(prop["mean_wait_std"], maj["mean_wait_std"])
        worse_stops = prop["total_stops_mean"] > maj["total_stops_mean"] + tol_stops
        worse_wait = prop["mean_wait_mean"] > maj["mean_wait_mean"] + tol_wait
        better_stops = prop["total_stops_mean"] < maj["total_stops_mean"] - tol_stops
        better_wait = prop["mean_wait_mean"] < maj["mean_wait_mean"] - tol_wait
        if worse_stops and worse_wait:
            verdict = "majority dominates"
        elif better_stops and better_wait:
            verdict = "proportional dominates"
        else:
            verdict = "non-dominated"
        rows.append({
            "scenario": scenario,
            "proportional_stops": float(prop["total_stops_mean"]),
            "majority_stops": float(maj["total_stops_mean"]),
            "proportional_wait": float(prop["mean_wait_mean"]),
            "majority_wait": float(maj["mean_wait_mean"]),
            "stops_tolerance": float(tol_stops),
            "wait_tolerance": float(tol_wait),
            "verdict": verdict,
        })
    return pd.DataFrame(rows, columns=[
        "scenario", "proportional_stops", "majority_stops", "proportional_wait",
        "majority_wait", "stops_tolerance", "wait_tolerance", "verdict",
    ])


# ---------------------------------------------------------------------------
# Acceptance checks
# ---------------------------------------------------------------------------

def _check_stops_policy(table: pd.DataFrame, horizon: int, lines: List[str]) -> str:
    lines.append("### 1. Stops-only policy never switches")
    row = _row(table, STOPS_DEMAND, "stops")
    if row is None:
        lines.append(f"_No stops-policy results on {STOPS_DEMAND}._")
        return SKIP
    fleet = sum(DEMANDS[STOPS_DEMAND])
    red_wait = max(row["ns_mean_wait_mean"], row["we_mean_wait_mean"])
    green_wait = min(row["ns_mean_wait_mean"], row["we_mean_wait_mean"])
    checks = [
        ("switch rate", f"{row['switch_rate_mean']:.3f}", "< 0.05", row["switch_rate_mean"] < 0.05),
        ("total stops", _fmt(row["total_stops_mean"]), f"<= {1.1 * fleet:.1f}",
         row["total_stops_mean"] <= 1.1 * fleet),
        ("red-leg mean wait (s)", _fmt(red_wait), f"> {0.5 * horizon:.0f}", red_wait > 0.5 * horizon),
        ("green-leg mean wait (s)", _fmt(green_wait), "< 5", green_wait < 5.0),
    ]
    return _check_table(checks, lines)


def _check_wait_policy(table: pd.DataFrame, horizon: int, lines: List[str]) -> str:
    lines.append("### 2. Wait-only policy keeps alternating")
    wait = _row(table, WAIT_DEMAND, "wait")
    stops = _row(table, WAIT_DEMAND, "stops")
    if wait is None or stops is None:
        lines.append(f"_Needs both stops and wait policies on {WAIT_DEMAND}._")
        return SKIP
    checks = [
        ("mean wait (s)", _fmt(wait["mean_wait_mean"]), f"< {0.15 * horizon:.0f}",
         wait["mean_wait_mean"] < 0.15 * horizon),
        ("total stops", _fmt(wait["total_stops_mean"]), f">= 3 x {_fmt(stops['total_stops_mean'])}",
         wait["total_stops_mean"] >= 3.0 * stops["total_stops_mean"]),
        ("switch rate", f"{wait['switch_rate_mean']:.3f}", "(info)", True),
    ]
    return _check_table(checks, lines)


def _check_balance(table: pd.DataFrame, lines: List[str]) -> str:
    lines.append("### 3. Multi-objective balance (proportional)")
    lines.append("| Demand | Multi wait | Stops-policy wait | Multi stops | Wait-policy stops | Result |")
    lines.append("|--------|------------|-------------------|-------------|-------------------|--------|")
    results = []
    for scenario in table["scenario"].unique():
        multi = _row(table, scenario, "multi", "proportional")
        stops = _row(table, scenario, "stops")
        wait = _row(table, scenario, "wait")
        if multi is None or stops is None or wait is None:
            continue
        ok = (multi["mean_wait_mean"] < stops["mean_wait_mean"]
              and multi["total_stops_mean"] < wait["total_stops_mean"])
        results.append(ok)
        lines.append(
            f"| {scenario} | {_fmt(multi['mean_wait_mean'])} | {_fmt(stops['mean_wait_mean'])} | "
            f"{_fmt(multi['total_stops_mean'])} | {_fmt(wait['total_stops_mean'])} | {PASS if ok else FAIL} |"
        )
    lines.append("")
    if not results:
        return SKIP
    return PASS if all(results) else FAIL


def _check_vote_rules(sweep: SweepResult, lines: List[str]) -> str:
    lines.append("### 4. Proportional vs majority")
    comparison = compare_vote_rules(sweep)
    if comparison.empty:
        lines.append("_Needs multi-policy results under both vote rules._")
        lines.append("")
        return SKIP
    lines.append("| Demand | Prop. stops | Maj. stops | Prop. wait | Maj. wait | Verdict |")
    lines.append("|--------|-------------|------------|------------|-----------|---------|")
    for _, r in comparison.iterrows():
        lines.append(
            f"| {r['scenario']} | {_fmt(r['proportional_stops'])} | {_fmt(r['majority_stops'])} | "
            f"{_fmt(r['proportional_wait'])} | {_fmt(r['majority_wait'])} | {r['verdict']} |"
        )
    lines.append("")
    return FAIL if (comparison["verdict"] == "majority dominates").any() else PASS


def _check_alignment(agreement: Optional[pd.DataFrame], lines: List[str]) -> str:
    lines.append("### 5. Alignment structure")
    if agreement is None or agreement.empty:
        lines.append("_No agreement table._")
        lines.append("")
        return SKIP

    def value(block: pd.DataFrame, a: str, b: str) -> float:
        return float(block[(block["policy_a"] == a) & (block["policy_b"] == b)]["agreement"].iloc[0])

    lines.append("| Vote rule | Bucket | stops~wait | multi~stops | multi~wait | Result |")
    lines.append("|-----------|--------|------------|-------------|------------|--------|")
    results = []
    for rule in sorted(agreement["vote_rule"].unique()):
        for bucket in DEMAND_BUCKETS:
            block = agreement[(agreement["vote_rule"] == rule) & (agreement["bucket"] == bucket)]
            if block.empty:
                continue
            sw = value(block, "stops-greedy", "wait-greedy")
            ms = value(block, "multi", "stops-greedy")
            mw = value(block, "multi", "wait-greedy")
            ok = sw < 0.6 and max(ms, mw) > sw
            results.append(ok)
            lines.append(f"| {rule} | {bucket} | {sw:.3f} | {ms:.3f} | {mw:.3f} | {PASS if ok else FAIL} |")
    lines.append("")
    if not results:
        return SKIP
    return PASS if all(results) else FAIL


def _check_table(checks, lines: List[str]) -> str:
    lines.append("| Check | Value | Target | Result |")
    lines.append("|-------|-------|--------|--------|")
    for name, val, target, ok in checks:
        lines.append(f"| {name} | {val} | {target} | {PASS if ok else FAIL} |")
    lines.append("")
    return PASS if all(ok for *_, ok in checks) else FAIL


def acceptance_report(sweep: SweepResult, agreement: Optional[pd.DataFrame] = None,
                      horizon_steps: int = HORIZON_STEPS) -> AcceptanceReport:
    """Markdown summary, one section per acceptance check. Contains no timestamps."""
    table = _default_split(sweep.aggregate)
    lines: List[str] = []
    lines.append("# Acceptance Summary")
    lines.append("")
    lines.append(f"Seeds per cell: {sweep.n_seeds}; scenarios: {', '.join(table['scenario'].unique())}")
    lines.append("")

    verdicts = {
        "stops_policy": _check_stops_policy(table, horizon_steps, lines),
        "wait_policy": _check_wait_policy(table, horizon_steps, lines),
        "balance": _check_balance(table, lines),
        "vote_rules": _check_vote_rules(sweep, lines),
        "alignment": _check_alignment(agreement, lines),
    }

    lines.append("### Verdict")
    lines.append("| Check | Result |")
    lines.append("|-------|--------|")
    for name, v in verdicts.items():
        lines.append(f"| {name} | {v} |")
    lines.append("")
    return AcceptanceReport(markdown="\n".join(lines), verdicts=verdicts)
