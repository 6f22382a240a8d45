"""Demand definitions, demand buckets and the policy / reward id tables."""
from typing import Dict, Tuple

# Demand id → (vehicles on North–South, vehicles on West–East)
DEMANDS: Dict[str, Tuple[int, int]] = {
    "low_unbalanced": (11, 6),
    "low_balanced": (11, 11),
    "medium_unbalanced": (22, 11),
    "medium_balanced": (22, 22),
    "high_unbalanced": (32, 16),
    "high_balanced": (32, 32),
}

# Buckets used by the alignment analysis
DEMAND_BUCKETS: Dict[str, Tuple[str, ...]] = {
    "low": ("low_unbalanced", "low_balanced"),
    "medium": ("medium_unbalanced", "medium_balanced"),
    "high": ("high_unbalanced", "high_balanced"),
}

REWARD_IDS: Tuple[str, ...] = ("stops", "wait", "linear", "cobb")
POLICY_IDS: Tuple[str, ...] = REWARD_IDS + ("multi",)
VOTE_RULES: Tuple[str, ...] = ("majority", "proportional")

# Objectives voted on by the vehicles; each one has its own trained net
OBJECTIVES: Tuple[str, ...] = ("stops", "wait")


def bucket_of(demand_id: str) -> str:
    """Return the low/medium/high bucket a demand id belongs to."""
    for bucket, members in DEMAND_BUCKETS.items():
        if demand_id in members:
            return bucket
    raise KeyError(f"Unknown demand id: {demand_id}")


def demand_id_for(n_ns: int, n_we: int) -> str:
    """Reverse lookup of a demand id; custom counts get an 'ns<N>_we<W>' id."""
    for demand_id, counts in DEMANDS.items():
        if counts == (n_ns, n_we):
            return demand_id
    return f"ns{n_ns}_we{n_we}"
