"""Softmax normalization, vote-weighted integration and action selection."""
from typing import Mapping, Optional, Sequence

import numpy as np

from crossvote.errors import DimensionError

QVector = np.ndarray
NormalizedQ = np.ndarray


def normalize_q(q: Sequence[float], temperature: float = 1.0) -> NormalizedQ:
    """Softmax of a Q-vector (max-subtracted); order and argmax are preserved."""
    values = np.asarray(q, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise DimensionError("a Q-vector must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(values)):
        raise ValueError(f"non-finite Q-values: {values}")
    if temperature <= 0:
        raise ValueError("softmax temperature must be positive")
    shifted = (values - values.max()) / temperature
    exp = np.exp(shifted)
    return exp / exp.sum()


def integrate(qs: Mapping[str, NormalizedQ], w: Mapping[str, float]) -> QVector:
    """q'_a = Σ_k w_k · q^k_a over the objectives k."""
    if set(qs) != set(w):
        raise DimensionError(f"objective sets differ: q-values {sorted(qs)} vs weights {sorted(w)}")
    lengths = {len(np.asarray(v)) for v in qs.values()}
    if len(lengths) != 1:
        raise DimensionError("normalized Q-vectors have different lengths")
    out = np.zeros(lengths.pop())
    for k in sorted(qs):
        out = out + w[k] * np.asarray(qs[k], dtype=np.float64)
    return out


def select_action(qp: Sequence[float], incumbent: Optional[int] = None) -> int:
    """Argmax; exact ties go to the incumbent phase, else to the lowest index."""
    values = np.asarray(qp, dtype=np.float64)
    if values.size == 0:
        raise DimensionError("cannot select an action from an empty vector")
    best = values.max()
    winners = np.flatnonzero(values == best)
    if incumbent is not None and incumbent in winners:
        return int(incumbent)
    return int(winners[0])
