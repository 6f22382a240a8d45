"""Decision policies: greedy single-objective nets and the vote-integrated multi-objective policy."""
import logging
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from crossvote.config.scenarios import OBJECTIVES, POLICY_IDS, VOTE_RULES
from crossvote.errors import ConfigError, DimensionError
from crossvote.neural.mlp import Mlp, forward
from crossvote.scoring.voting import Weights, get_vote_rule
from crossvote.sim.models import Phase
from crossvote.sim.world import SimWorld

from .integration import integrate, normalize_q, select_action

logger = logging.getLogger(__name__)


class PolicyConfig(BaseModel):
    """Which policy drives the signal, and how the multi policy aggregates votes."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    policy: str = "multi"
    vote_rule: Optional[str] = None
    temperature: float = Field(1.0, gt=0.0)

    @field_validator("policy")
    @classmethod
    def _known_policy(cls, v: str) -> str:
        if v not in POLICY_IDS:
            raise ValueError(f"unknown policy {v!r}; expected one of {', '.join(POLICY_IDS)}")
        return v

    @field_validator("vote_rule")
    @classmethod
    def _known_rule(cls, v: Optional[str]) -> Optional[str]:
        if v is not None and v not in VOTE_RULES:
            raise ValueError(f"unknown vote rule {v!r}; expected one of {', '.join(VOTE_RULES)}")
        return v

    @model_validator(mode="after")
    def _rule_for_multi(self) -> "PolicyConfig":
        if self.policy == "multi" and self.vote_rule is None:
            raise ValueError("policy 'multi' requires a vote_rule")
        return self

    @property
    def label(self) -> str:
        return f"multi-{self.vote_rule}" if self.policy == "multi" else self.policy


@dataclass
class DecisionRecord:
    """Everything that went into one signal decision."""
    clock: int
    incumbent: int
    obs: np.ndarray
    votes_stops: int
    votes_wait: int
    weights: Weights
    q: Dict[str, np.ndarray]
    q_integrated: np.ndarray
    action: int

    @property
    def phase(self) -> Phase:
        return Phase(self.action)


def greedy_action(net: Mlp, obs: np.ndarray, incumbent: Optional[int] = None,
                  temperature: float = 1.0) -> int:
    """Action of a single net acting greedily (on its softmax-normalized Q-vector)."""
    return select_action(normalize_q(forward(net, obs), temperature), incumbent)


def integrated_action(nets: Mapping[str, Mlp], obs: np.ndarray, weights: Weights,
                      incumbent: Optional[int] = None, temperature: float = 1.0) -> int:
    qs = {k: normalize_q(forward(net, obs), temperature) for k, net in nets.items()}
    return select_action(integrate(qs, weights), incumbent)


class Policy:
    """A decision function world -> Phase that logs every decision it makes."""

    policy_id: str = ""

    def __init__(self):
        self.records: List[DecisionRecord] = []

    def reset(self) -> None:
        self.records = []

    def decide(self, world: SimWorld) -> Phase:
        record = self._decide(world)
        self.records.append(record)
        return record.phase

    def __call__(self, world: SimWorld) -> Phase:
        return self.decide(world)

    def _decide(self, world: SimWorld) -> DecisionRecord:
        raise NotImplementedError


class GreedyPolicy(Policy):
    """Greedy (no exploration) action of one trained Q-network."""

    def __init__(self, net: Mlp, policy_id: str, temperature: float = 1.0):
        super().__init__()
        self.net = net
        self.policy_id = policy_id
        self.temperature = temperature

    def _decide(self, world: SimWorld) -> DecisionRecord:
        obs = world.observe()
        tally = world.poll_voters()
        incumbent = int(world.phase)
        qn = normalize_q(forward(self.net, obs), self.temperature)
        action = select_action(qn, incumbent)
        return DecisionRecord(
            clock=world.clock, incumbent=incumbent, obs=obs,
            votes_stops=tally.votes_stops, votes_wait=tally.votes_wait,
            weights={self.policy_id: 1.0}, q={self.policy_id: qn},
            q_integrated=qn, action=action,
        )


class MultiObjectivePolicy(Policy):
    """
    Per-objective nets fused under the weights the polled vehicles vote for:
    obs -> softmax(Q_k) per objective -> Σ_k w_k q_k -> argmax.
    """

    policy_id = "multi"

    def __init__(self, nets: Mapping[str, Mlp], rule: str = "proportional", temperature: float = 1.0):
        super().__init__()
        if len(nets) < 2:
            raise ConfigError("the multi-objective policy needs at least two objective nets")
        dims = {(n.input_dim, n.output_dim) for n in nets.values()}
        if len(dims) != 1:
            raise DimensionError(f"objective nets disagree on input/output dims: {sorted(dims)}")
        self.nets = dict(nets)
        self.rule = rule
        self.weigh: Callable = get_vote_rule(rule)
        self.temperature = temperature

    def _decide(self, world: SimWorld) -> DecisionRecord:
        obs = world.observe()
        tally = world.poll_voters()
        incumbent = int(world.phase)
        weights = self.weigh(tally)
        if set(weights) != set(self.nets):
            raise DimensionError(f"vote objectives {sorted(weights)} do not match nets {sorted(self.nets)}")
        qs = {k: normalize_q(forward(net, obs), self.temperature) for k, net in self.nets.items()}
        q_int = integrate(qs, weights)
        action = select_action(q_int, incumbent)
        return DecisionRecord(
            clock=world.clock, incumbent=incumbent, obs=obs,
            votes_stops=tally.votes_stops, votes_wait=tally.votes_wait,
            weights=weights, q=qs, q_integrated=q_int, action=action,
        )


class FunctionPolicy(Policy):
    """Wraps a plain world -> Phase callable (hand-written controllers, tests)."""

    def __init__(self, fn: Callable[[SimWorld], Phase], policy_id: str = "function"):
        super().__init__()
        self.fn = fn
        self.policy_id = policy_id

    def _decide(self, world: SimWorld) -> DecisionRecord:
        obs = world.observe()
        tally = world.poll_voters()
        incumbent = int(world.phase)
        action = int(Phase(self.fn(world)))
        onehot = np.zeros(2)
        onehot[action] = 1.0
        return DecisionRecord(
            clock=world.clock, incumbent=incumbent, obs=obs,
            votes_stops=tally.votes_stops, votes_wait=tally.votes_wait,
            weights={}, q={}, q_integrated=onehot, action=action,
        )


def multi_objective_policy(nets: Mapping[str, Mlp], rule: str = "proportional",
                           temperature: float = 1.0) -> MultiObjectivePolicy:
    return MultiObjectivePolicy(nets, rule, temperature)


def build_policy(cfg: PolicyConfig, nets: Mapping[str, Mlp]) -> Policy:
    """Instantiate the configured policy from the trained nets keyed by reward id."""
    if cfg.policy == "multi":
        missing = [k for k in OBJECTIVES if k not in nets]
        if missing:
            raise ConfigError(f"multi policy needs nets for {', '.join(missing)}")
        return MultiObjectivePolicy({k: nets[k] for k in OBJECTIVES}, cfg.vote_rule, cfg.temperature)
    if cfg.policy not in nets:
        raise ConfigError(f"no trained net for policy {cfg.policy!r}")
    return GreedyPolicy(nets[cfg.policy], cfg.policy, cfg.temperature)


def required_nets(policies) -> List[str]:
    """Reward ids whose checkpoints the given PolicyConfigs need, in stable order."""
    needed = set()
    for p in policies:
        needed.update(OBJECTIVES if p.policy == "multi" else (p.policy,))
    return [r for r in POLICY_IDS if r in needed]
