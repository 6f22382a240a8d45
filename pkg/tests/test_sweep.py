import json

import numpy as np
import pandas as pd
import pytest

from crossvote.analysis.policy import PolicyConfig
from crossvote.config.scenarios import DEMANDS
from crossvote.errors import ConfigError
from crossvote.harness.export import (
    RADAR_JSON, config_hash, emit_radar_data, read_sweep, run_dir_name, write_sweep,
)
from crossvote.harness.sweep import (
    METRIC_COLUMNS, SweepResult, aggregate, resolve_seeds, run_preference_sweep, run_sweep,
)
from crossvote.sim.models import ScenarioConfig
from crossvote.sim.world import init_scenario

GREEDY = [PolicyConfig(policy="stops"), PolicyConfig(policy="wait")]


@pytest.fixture
def base():
    return ScenarioConfig(horizon_steps=60)


@pytest.fixture
def small_sweep(base, tiny_nets):
    return run_sweep(list(DEMANDS), 3, GREEDY, tiny_nets, base=base)


def test_sweep_counts(small_sweep):
    assert len(small_sweep.per_seed) == 36
    assert len(small_sweep.aggregate) == 12
    assert small_sweep.seeds == [1, 2, 3]
    assert set(small_sweep.aggregate["seeds"]) == {3}
    assert set(small_sweep.per_seed["vote_rule"]) == {"none"}
    assert small_sweep.decisions is None


def test_aggregate_is_the_hand_average(small_sweep):
    per_seed = small_sweep.per_seed
    for _, row in small_sweep.aggregate.iterrows():
        cell = per_seed[(per_seed["scenario"] == row["scenario"]) & (per_seed["policy"] == row["policy"])]
        for m in METRIC_COLUMNS:
            values = cell[m].to_numpy(dtype=float)
            assert row[f"{m}_mean"] == pytest.approx(values.sum() / len(values))
            assert row[f"{m}_std"] == pytest.approx(np.sqrt(((values - values.mean()) ** 2).mean()))
            assert row[f"{m}_std"] >= 0.0


def test_parallel_matches_serial(base, tiny_nets, tmp_path):
    policies = GREEDY + [PolicyConfig(policy="multi", vote_rule="proportional")]
    demands = ["low_balanced", "high_unbalanced"]
    serial = run_sweep(demands, 2, policies, tiny_nets, base=base, parallel=1)
    parallel = run_sweep(demands, 2, policies, tiny_nets, base=base, parallel=2)
    write_sweep(serial, tmp_path / "serial")
    write_sweep(parallel, tmp_path / "parallel")
    for name in ("per_seed.csv", "aggregate.csv", RADAR_JSON):
        assert (tmp_path / "serial" / name).read_bytes() == (tmp_path / "parallel" / name).read_bytes()


def test_high_unbalanced_builds_48_vehicles(base):
    n_ns, n_we = DEMANDS["high_unbalanced"]
    world = init_scenario(base.replace(n_ns=n_ns, n_we=n_we, seed=1))
    assert len(world.vehicles) == 48
    assert world.road_counts() == (32, 16)


def test_unknown_demand_and_bad_seeds(tiny_nets):
    with pytest.raises(ConfigError):
        run_sweep(["rush_hour"], 1, GREEDY, tiny_nets)
    with pytest.raises(ConfigError):
        resolve_seeds(0)
    with pytest.raises(ConfigError):
        run_sweep(["low_balanced"], 1, [], tiny_nets)
    assert resolve_seeds([4, 9]) == [4, 9]


def test_radar_json_matches_csv(small_sweep, tmp_path):
    paths = write_sweep(small_sweep, tmp_path)
    radar = json.loads(paths["radar"].read_text())
    agg = pd.read_csv(paths["aggregate"], float_precision="round_trip")
    assert set(radar) == set(DEMANDS)
    for scenario, policies in radar.items():
        assert set(policies) == {"stops", "wait"}
        for policy, values in policies.items():
            row = agg[(agg["scenario"] == scenario) & (agg["policy"] == policy)].iloc[0]
            assert values == {
                "speed": row["mean_speed_mean"], "stops": row["total_stops_mean"], "wait": row["mean_wait_mean"],
            }


def test_radar_reemission_is_byte_identical(small_sweep, tmp_path):
    a = emit_radar_data(small_sweep, tmp_path / "a.json").read_bytes()
    b = emit_radar_data(small_sweep, tmp_path / "b.json").read_bytes()
    assert a == b


def test_radar_rejects_empty_sweep(tmp_path):
    empty = SweepResult(per_seed=pd.DataFrame(), aggregate=pd.DataFrame())
    with pytest.raises(ValueError):
        emit_radar_data(empty, tmp_path / "radar.json")


def test_write_then_read_sweep(small_sweep, tmp_path):
    write_sweep(small_sweep, tmp_path)
    loaded = read_sweep(tmp_path)
    assert loaded.seeds == [1, 2, 3]
    pd.testing.assert_frame_equal(loaded.aggregate, small_sweep.aggregate, check_dtype=False)
    pd.testing.assert_frame_equal(aggregate(loaded.per_seed), small_sweep.aggregate, check_dtype=False)


def test_preference_sweep(base, tiny_nets, tmp_path):
    policies = [PolicyConfig(policy="multi", vote_rule="majority")]
    sweep = run_preference_sweep(["medium_balanced"], 2, [0.0, 1.0], policies, tiny_nets,
                                 base=base, keep_decisions=True)
    assert sorted(sweep.aggregate["preference_split"]) == [0.0, 1.0]
    decisions = sweep.decisions
    assert (decisions[decisions["preference_split"] == 0.0]["votes_stops"] == 0).all()
    assert (decisions[decisions["preference_split"] == 1.0]["votes_wait"] == 0).all()
    radar = json.loads(emit_radar_data(sweep, tmp_path / "radar.json").read_text())
    assert set(radar["medium_balanced"]) == {"multi-majority@0.0", "multi-majority@1.0"}
    with pytest.raises(ConfigError):
        run_preference_sweep(["medium_balanced"], 1, [1.5], policies, tiny_nets, base=base)


def test_run_dir_name_is_stable():
    effective = {"scenario": {"n_ns": 11}, "seeds": 3}
    assert config_hash(effective) == config_hash(dict(reversed(list(effective.items()))))
    name = run_dir_name(effective)
    stamp, digest = name.split("-")
    assert len(stamp) == 16 and stamp.endswith("Z")
    assert digest == config_hash(effective)
