"""Reward functions computed from one decision interval of stop events."""
from typing import Callable, Dict

from pydantic import BaseModel, ConfigDict, Field

from crossvote.errors import ConfigError
from crossvote.sim.models import IntervalEvents, ScenarioConfig

# Weighting exponents / coefficients for the combined rewards
ALPHA = 0.5
BETA = 0.5


class RewardParams(BaseModel):
    """Coefficients and normalizers of the linear and Cobb–Douglas rewards."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    alpha: float = Field(ALPHA, gt=0.0, le=1.0)
    beta: float = Field(BETA, gt=0.0, le=1.0)
    max_stops_norm: float = Field(1.0, gt=0.0)
    max_wait_norm: float = Field(1.0, gt=0.0)


def reward_params_for(cfg: ScenarioConfig, alpha: float = ALPHA, beta: float = BETA) -> RewardParams:
    """
    Stops are scaled by their per-interval ceiling (one stop per vehicle);
    wait by half of its ceiling (every vehicle stopped the whole interval).
    """
    fleet = max(1, cfg.fleet_size)
    return RewardParams(
        alpha=alpha,
        beta=beta,
        max_stops_norm=float(fleet),
        max_wait_norm=cfg.t_act * fleet / 2.0,
    )


def _check_norms(p: RewardParams) -> None:
    if not (p.max_stops_norm > 0 and p.max_wait_norm > 0):
        raise ConfigError("reward norms must be strictly positive")


def _power(base: float, exponent: float) -> float:
    # 0 ** a is taken as 0 for a in (0, 1]
    return 0.0 if base <= 0.0 else base ** exponent


def reward_stops(ev: IntervalEvents) -> float:
    """
    r_stops: Stops Reward

    Formula: r_stops = -Σ_v new_stops_v over the interval

    Measures: How many vehicles came to a halt since the last decision
    """
    return -float(ev.new_stops)


def reward_wait(ev: IntervalEvents) -> float:
    """
    r_wait: Waiting-Time Reward

    Formula: r_wait = -Σ_v stopped_seconds_v over the interval

    Measures: Vehicle-seconds spent standing since the last decision
    """
    return -float(ev.stopped_seconds)


def reward_linear(r_s: float, r_w: float, p: RewardParams) -> float:
    """
    r_lin: Linear Combination

    Formula: r_lin = α · r_stops / norm_stops + β · r_wait / norm_wait

    Both terms are ≤ 0; the norms put them on a comparable scale
    """
    _check_norms(p)
    return p.alpha * (r_s / p.max_stops_norm) + p.beta * (r_w / p.max_wait_norm)


def reward_cobb_douglas(r_s: float, r_w: float, p: RewardParams) -> float:
    """
    r_cd: Cobb–Douglas Combination

    Formula: r_cd = -(|r_stops| / norm_stops)^α · (|r_wait| / norm_wait)^β

    Zero whenever either objective is zero for the interval
    """
    _check_norms(p)
    stops = _power(-r_s / p.max_stops_norm, p.alpha)
    wait = _power(-r_w / p.max_wait_norm, p.beta)
    return -(stops * wait)


# ---------------------------------------------------------------------------
# Registry keyed by reward id
# ---------------------------------------------------------------------------

def _stops(ev: IntervalEvents, p: RewardParams) -> float:
    return reward_stops(ev)


def _wait(ev: IntervalEvents, p: RewardParams) -> float:
    return reward_wait(ev)


def _linear(ev: IntervalEvents, p: RewardParams) -> float:
    return reward_linear(reward_stops(ev), reward_wait(ev), p)


def _cobb(ev: IntervalEvents, p: RewardParams) -> float:
    return reward_cobb_douglas(reward_stops(ev), reward_wait(ev), p)


REWARD_FUNCTIONS: Dict[str, Callable[[IntervalEvents, RewardParams], float]] = {
    "stops": _stops,
    "wait": _wait,
    "linear": _linear,
    "cobb": _cobb,
}


def get_reward_fn(reward_id: str) -> Callable[[IntervalEvents, RewardParams], float]:
    try:
        return REWARD_FUNCTIONS[reward_id]
    except KeyError:
        raise ConfigError(
            f"unknown reward id {reward_id!r}; expected one of {', '.join(REWARD_FUNCTIONS)}"
        ) from None
