"""Replay-buffer Deep Q-learning on the intersection simulation."""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from tqdm import trange

from crossvote.analysis.integration import select_action
from crossvote.config.scenarios import DEMANDS, demand_id_for
from crossvote.scoring.rewards import ALPHA, BETA, RewardParams, get_reward_fn, reward_params_for
from crossvote.sim.models import Phase, ScenarioConfig
from crossvote.sim.world import init_scenario

from .mlp import DEFAULT_HIDDEN, N_ACTIONS, Mlp, forward, forward_batch, gradients, loss, optimizer_step
from .replay import ReplayBuffer, Transition, TransitionBatch

logger = logging.getLogger(__name__)


class Hyperparams(BaseModel):
    """Training hyperparameters; every knob is exposed for reproducibility."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    gamma: float = Field(0.9, ge=0.0, lt=1.0)
    learning_rate: float = Field(1e-3, gt=0.0)
    epsilon_start: float = Field(1.0, ge=0.0, le=1.0)
    epsilon_end: float = Field(0.05, ge=0.0, le=1.0)
    epsilon_decay_steps: int = Field(20000, gt=0)
    buffer_capacity: int = Field(50000, gt=0)
    batch_size: int = Field(32, gt=0)
    target_sync_every: int = Field(250, gt=0)
    train_episodes: int = Field(200, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)
    hidden_dims: Tuple[int, ...] = DEFAULT_HIDDEN
    normalize_rewards: bool = True
    max_grad_norm: Optional[float] = Field(10.0, gt=0.0)
    sample_demands: bool = True

    @model_validator(mode="after")
    def _check_schedule(self) -> "Hyperparams":
        if self.epsilon_end > self.epsilon_start:
            raise ValueError("epsilon_end must not exceed epsilon_start")
        if any(d < 1 for d in self.hidden_dims):
            raise ValueError("hidden layer sizes must be positive")
        return self


def epsilon_at(step: int, hp: Hyperparams) -> float:
    """Linear decay from epsilon_start to epsilon_end, flat from decay_steps on."""
    if step >= hp.epsilon_decay_steps:
        return hp.epsilon_end
    frac = step / hp.epsilon_decay_steps
    return hp.epsilon_start + (hp.epsilon_end - hp.epsilon_start) * frac


def td_targets(batch: Union[TransitionBatch, Sequence[Transition]], target_net: Mlp, gamma: float) -> np.ndarray:
    """reward + γ · max_a Q_target(next_obs)[a], without the bootstrap on terminals."""
    if not isinstance(batch, TransitionBatch):
        batch = TransitionBatch.from_transitions(list(batch))
    if len(batch) == 0:
        return np.zeros(0)
    next_q = forward_batch(target_net, batch.next_obs).max(axis=1)
    return batch.rewards + np.where(batch.terminal, 0.0, gamma * next_q)


class DQNTrainer:
    """Online network, periodically synced target network and the update rule."""

    def __init__(self, net: Mlp, hp: Hyperparams):
        self.online = net
        self.target = net.copy()
        self.hp = hp
        self.updates = 0

    def learn(self, batch: TransitionBatch) -> float:
        """One gradient step on a batch; returns the pre-step loss."""
        targets = td_targets(batch, self.target, self.hp.gamma)
        arrays = (batch.obs, batch.actions, targets)
        current = loss(self.online, arrays)
        grads = gradients(self.online, arrays)
        if self.hp.max_grad_norm is not None:
            grads = grads.clipped(self.hp.max_grad_norm)
        optimizer_step(self.online, grads, self.hp.learning_rate)
        self.updates += 1
        if self.updates % self.hp.target_sync_every == 0:
            self.target = self.online.copy()
        return current


@dataclass
class TrainingResult:
    net: Mlp
    curve: List[Dict[str, Any]] = field(default_factory=list)


def _scaled_reward(reward_id: str, raw: float, params: RewardParams, normalize: bool) -> float:
    if not normalize:
        return raw
    if reward_id == "stops":
        return raw / params.max_stops_norm
    if reward_id == "wait":
        # max_wait_norm is half of the interval ceiling
        return raw / (2.0 * params.max_wait_norm)
    return raw


def train_dqn(cfg: ScenarioConfig, reward_id: str, hp: Hyperparams,
              reward_params: Optional[RewardParams] = None,
              alpha: float = ALPHA, beta: float = BETA,
              progress: bool = False) -> TrainingResult:
    """
    Train one Q-network on one reward. Every random draw (initial weights,
    demand, episode seeds, exploration, replay sampling) comes from a single
    stream seeded with hp.seed, so the result is a pure function of the
    arguments. Without explicit reward_params the norms follow each
    episode's fleet.
    """
    reward_fn = get_reward_fn(reward_id)
    rng = np.random.default_rng(hp.seed)
    dims = (cfg.obs_dim,) + tuple(hp.hidden_dims) + (N_ACTIONS,)
    net = Mlp.initialize(dims, rng)
    trainer = DQNTrainer(net, hp)
    buffer = ReplayBuffer(hp.buffer_capacity, cfg.obs_dim, rng)
    demand_ids = list(DEMANDS)

    step = 0
    curve: List[Dict[str, Any]] = []
    for episode in trange(hp.train_episodes, desc=f"train[{reward_id}]", disable=not progress):
        if hp.sample_demands:
            demand_id = demand_ids[int(rng.integers(len(demand_ids)))]
            n_ns, n_we = DEMANDS[demand_id]
        else:
            n_ns, n_we = cfg.n_ns, cfg.n_we
            demand_id = demand_id_for(n_ns, n_we)
        episode_seed = int(rng.integers(0, 2**63))
        ep_cfg = cfg.replace(n_ns=n_ns, n_we=n_we, seed=episode_seed)
        params = reward_params if reward_params is not None else reward_params_for(ep_cfg, alpha, beta)

        world = init_scenario(ep_cfg)
        obs = world.observe()
        episode_return = 0.0
        losses: List[float] = []
        for k in range(ep_cfg.n_decisions):
            incumbent = int(world.phase)
            if rng.random() < epsilon_at(step, hp):
                action = int(rng.integers(N_ACTIONS))
            else:
                action = select_action(forward(trainer.online, obs), incumbent)

            world.set_phase(Phase(action))
            for _ in range(ep_cfg.t_act):
                world.tick()
            events = world.drain_interval_events()
            raw = reward_fn(events, params)
            episode_return += raw
            next_obs = world.observe()

            buffer.add(Transition(
                obs=obs, action=action,
                reward=_scaled_reward(reward_id, raw, params, hp.normalize_rewards),
                next_obs=next_obs, terminal=k == ep_cfg.n_decisions - 1,
            ))
            if len(buffer) >= hp.batch_size:
                losses.append(trainer.learn(buffer.sample(hp.batch_size)))
            obs = next_obs
            step += 1

        curve.append({
            "episode": episode,
            "demand": demand_id,
            "return": episode_return,
            "mean_loss": float(np.mean(losses)) if losses else float("nan"),
            "epsilon": epsilon_at(step, hp),
            "updates": trainer.updates,
        })
        logger.debug("episode %d [%s] return=%.3f", episode, demand_id, episode_return)

    logger.info("trained %s net: %d episodes, %d updates", reward_id, hp.train_episodes, trainer.updates)
    return TrainingResult(net=trainer.online, curve=curve)
