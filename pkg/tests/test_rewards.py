import numpy as np
import pytest
from hypothesis import given, strategies as st

from crossvote.errors import ConfigError
from crossvote.scoring.rewards import (
    REWARD_FUNCTIONS, RewardParams, get_reward_fn, reward_cobb_douglas, reward_linear,
    reward_params_for, reward_stops, reward_wait,
)
from crossvote.sim.models import IntervalEvents, ScenarioConfig

non_positive = st.floats(min_value=-1e4, max_value=0.0, allow_nan=False)


def events(stops, seconds):
    return IntervalEvents(
        new_stops_by_vehicle=np.asarray(stops, dtype=np.int64),
        stopped_seconds_by_vehicle=np.asarray(seconds, dtype=np.float64),
    )


def test_stops_reward_counts_new_stops():
    assert reward_stops(events([0, 0], [0.0, 0.0])) == 0.0
    assert reward_stops(events([1, 2, 1], [0.0, 3.0, 1.0])) == -4.0


def test_wait_reward_sums_stopped_seconds():
    assert reward_wait(events([0], [0.0])) == 0.0
    assert reward_wait(events([0, 1], [2.0, 5.0])) == -7.0


def test_linear_reward_hand_value():
    p = RewardParams(max_stops_norm=8.0, max_wait_norm=20.0)
    assert reward_linear(0.0, 0.0, p) == 0.0
    assert reward_linear(-4.0, -10.0, p) == pytest.approx(-0.5)
    doubled = RewardParams(max_stops_norm=16.0, max_wait_norm=40.0)
    assert reward_linear(-4.0, -10.0, doubled) == pytest.approx(-0.25)


def test_cobb_douglas_hand_value():
    p = RewardParams()
    assert reward_cobb_douglas(0.0, -7.0, p) == 0.0
    assert reward_cobb_douglas(-0.25, -0.16, p) == pytest.approx(-0.2)
    assert reward_cobb_douglas(-0.16, -0.25, p) == pytest.approx(-0.2)


def test_equal_factors_cross_check():
    p = RewardParams(max_stops_norm=10.0, max_wait_norm=50.0)
    x = 0.3
    assert reward_cobb_douglas(-x * 10.0, -x * 50.0, p) == pytest.approx(-x)
    assert reward_linear(-x * 10.0, -x * 50.0, p) == pytest.approx(-x)


def test_norms_follow_fleet_size():
    p = reward_params_for(ScenarioConfig(n_ns=11, n_we=6))
    assert p.max_stops_norm == 17.0
    assert p.max_wait_norm == 5 * 17 / 2
    empty = reward_params_for(ScenarioConfig(n_ns=0, n_we=0))
    assert empty.max_stops_norm == 1.0
    assert empty.max_wait_norm == 2.5


def test_invalid_params_rejected():
    with pytest.raises(ValueError):
        RewardParams(alpha=0.0)
    with pytest.raises(ValueError):
        RewardParams(beta=1.5)
    with pytest.raises(ValueError):
        RewardParams(max_stops_norm=0.0)


def test_registry():
    assert set(REWARD_FUNCTIONS) == {"stops", "wait", "linear", "cobb"}
    ev = events([1, 0], [5.0, 5.0])
    p = RewardParams(max_stops_norm=2.0, max_wait_norm=5.0)
    assert get_reward_fn("stops")(ev, p) == -1.0
    assert get_reward_fn("wait")(ev, p) == -10.0
    assert get_reward_fn("linear")(ev, p) == pytest.approx(0.5 * -0.5 + 0.5 * -2.0)
    assert get_reward_fn("cobb")(ev, p) == pytest.approx(-np.sqrt(0.5 * 2.0))
    with pytest.raises(ConfigError):
        get_reward_fn("speed")


@pytest.mark.parametrize("fn", [reward_stops, reward_wait, reward_linear, reward_cobb_douglas])
def test_reward_docstrings_state_their_formula(fn):
    doc = fn.__doc__ or ""
    assert "Formula:" in doc


@given(r_s=non_positive, r_w=non_positive)
def test_combined_rewards_are_non_positive(r_s, r_w):
    p = RewardParams(max_stops_norm=7.0, max_wait_norm=17.5)
    assert reward_linear(r_s, r_w, p) <= 0.0
    assert reward_cobb_douglas(r_s, r_w, p) <= 0.0


@given(r_s=non_positive, r_w=non_positive, d=st.floats(min_value=0.0, max_value=100.0))
def test_combined_rewards_are_monotone(r_s, r_w, d):
    p = RewardParams(max_stops_norm=7.0, max_wait_norm=17.5)
    assert reward_linear(r_s - d, r_w, p) <= reward_linear(r_s, r_w, p) + 1e-12
    assert reward_linear(r_s, r_w - d, p) <= reward_linear(r_s, r_w, p) + 1e-12
    assert reward_cobb_douglas(r_s - d, r_w, p) <= reward_cobb_douglas(r_s, r_w, p) + 1e-12
    assert reward_cobb_douglas(r_s, r_w - d, p) <= reward_cobb_douglas(r_s, r_w, p) + 1e-12


@given(st.lists(st.integers(min_value=0, max_value=3), min_size=1, max_size=20))
def test_wait_reward_bounded_by_interval(stopped):
    seconds = np.minimum(np.asarray(stopped, dtype=float), 5.0)
    ev = events([0] * len(stopped), seconds)
    assert reward_wait(ev) <= 0.0
    assert abs(reward_wait(ev)) <= 5 * len(stopped)
