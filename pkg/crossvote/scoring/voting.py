"""Aggregate polled preferences into per-objective weights."""
from typing import Dict, Mapping, Union

from crossvote.errors import ConfigError
from crossvote.sim.models import VoteTally

Weights = Dict[str, float]
TallyLike = Union[VoteTally, Mapping[str, int]]


def _counts(t: TallyLike) -> Dict[str, int]:
    counts = t.counts() if isinstance(t, VoteTally) else dict(t)
    if len(counts) < 2:
        raise ValueError("at least two objectives are required")
    if any(v < 0 for v in counts.values()):
        raise ValueError("vote counts must be non-negative")
    return counts


def _uniform(keys) -> Weights:
    keys = list(keys)
    return {k: 1.0 / len(keys) for k in keys}


def majority_weights(t: TallyLike) -> Weights:
    """
    One-hot on the unique most-voted objective; tied leaders share the
    weight equally, so an empty poll gives uniform weights.
    """
    counts = _counts(t)
    top = max(counts.values())
    leaders = [k for k, v in counts.items() if v == top]
    share = 1.0 / len(leaders)
    return {k: (share if k in leaders else 0.0) for k in counts}


def proportional_weights(t: TallyLike) -> Weights:
    """Weights equal to vote shares; uniform when nobody was polled."""
    counts = _counts(t)
    total = sum(counts.values())
    if total == 0:
        return _uniform(counts)
    return {k: v / total for k, v in counts.items()}


VOTE_RULES = {
    "majority": majority_weights,
    "proportional": proportional_weights,
}


def get_vote_rule(name: str):
    try:
        return VOTE_RULES[name]
    except KeyError:
        raise ConfigError(f"unknown vote rule {name!r}; expected majority or proportional") from None
