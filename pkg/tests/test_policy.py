import numpy as np
import pytest
from pydantic import ValidationError

from crossvote.analysis.integration import integrate, select_action
from crossvote.analysis.policy import (
    FunctionPolicy, GreedyPolicy, MultiObjectivePolicy, PolicyConfig, build_policy,
    greedy_action, multi_objective_policy, required_nets,
)
from crossvote.errors import ConfigError, DimensionError
from crossvote.harness.episode import run_episode
from crossvote.neural.mlp import Mlp
from crossvote.scoring.voting import get_vote_rule
from crossvote.sim.models import Phase, ScenarioConfig, VoteTally


def test_policy_config_validation():
    assert PolicyConfig(policy="multi", vote_rule="majority").label == "multi-majority"
    assert PolicyConfig(policy="wait").label == "wait"
    with pytest.raises(ValidationError):
        PolicyConfig(policy="multi")
    with pytest.raises(ValidationError):
        PolicyConfig(policy="speed")
    with pytest.raises(ValidationError):
        PolicyConfig(policy="multi", vote_rule="borda")
    with pytest.raises(ValidationError):
        PolicyConfig(policy="stops", temperature=0.0)


def test_build_policy(tiny_nets):
    greedy = build_policy(PolicyConfig(policy="stops"), tiny_nets)
    assert isinstance(greedy, GreedyPolicy) and greedy.policy_id == "stops"
    multi = build_policy(PolicyConfig(policy="multi", vote_rule="proportional"), tiny_nets)
    assert isinstance(multi, MultiObjectivePolicy) and multi.rule == "proportional"
    with pytest.raises(ConfigError):
        build_policy(PolicyConfig(policy="linear"), tiny_nets)
    with pytest.raises(ConfigError):
        build_policy(PolicyConfig(policy="multi", vote_rule="majority"), {"stops": tiny_nets["stops"]})


def test_required_nets():
    configs = [PolicyConfig(policy="cobb"), PolicyConfig(policy="multi", vote_rule="majority")]
    assert required_nets(configs) == ["stops", "wait", "cobb"]
    assert required_nets([PolicyConfig(policy="wait")]) == ["wait"]


def test_multi_policy_needs_matching_nets(tiny_nets):
    with pytest.raises(ConfigError):
        MultiObjectivePolicy({"stops": tiny_nets["stops"]})
    odd = {"stops": tiny_nets["stops"], "wait": Mlp.zeros((8, 4, 2))}
    with pytest.raises(DimensionError):
        multi_objective_policy(odd)


def test_unanimous_stops_majority_matches_stops_greedy(tiny_nets):
    cfg = ScenarioConfig(n_ns=22, n_we=11, horizon_steps=300, seed=8, preference_split=1.0)
    log = run_episode(cfg, multi_objective_policy(tiny_nets, "majority"))
    polled = [r for r in log.records if r.votes_stops > 0]
    assert polled
    for r in polled:
        assert r.votes_wait == 0
        assert r.weights == {"stops": 1.0, "wait": 0.0}
        assert r.action == greedy_action(tiny_nets["stops"], r.obs, r.incumbent)


def test_agreeing_nets_ignore_the_vote(tiny_nets):
    same = {"stops": tiny_nets["stops"], "wait": tiny_nets["stops"].copy()}
    cfg = ScenarioConfig(n_ns=22, n_we=22, horizon_steps=200, seed=1)
    multi = run_episode(cfg, multi_objective_policy(same, "proportional"))
    greedy = run_episode(cfg, GreedyPolicy(tiny_nets["stops"], "stops"))
    assert np.array_equal(multi.actions, greedy.actions)


@pytest.mark.parametrize("rule", ["majority", "proportional"])
def test_logged_decisions_replay_exactly(tiny_nets, rule):
    cfg = ScenarioConfig(n_ns=11, n_we=11, horizon_steps=300, seed=5)
    log = run_episode(cfg, multi_objective_policy(tiny_nets, rule))
    weigh = get_vote_rule(rule)
    for r in log.records:
        assert r.weights == weigh(VoteTally(r.votes_stops, r.votes_wait))
        assert select_action(integrate(r.q, r.weights), r.incumbent) == r.action
        assert np.array_equal(r.q_integrated, integrate(r.q, r.weights))
        for q in r.q.values():
            assert abs(q.sum() - 1.0) <= 1e-12


def test_records_follow_the_clock(short_cfg, tiny_nets):
    log = run_episode(short_cfg, GreedyPolicy(tiny_nets["wait"], "wait"))
    clocks = [r.clock for r in log.records]
    assert clocks == list(range(0, short_cfg.horizon_steps, short_cfg.t_act))
    assert all(r.weights == {"wait": 1.0} for r in log.records)


def test_function_policy_logs_one_hot(short_cfg):
    log = run_episode(short_cfg, FunctionPolicy(lambda w: Phase.WE_GREEN))
    assert set(log.actions) == {1}
    assert all(np.array_equal(r.q_integrated, [0.0, 1.0]) for r in log.records)
    assert log.vote_rule == "none"
