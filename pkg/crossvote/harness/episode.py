"""One evaluation episode: decide, apply the phase, tick t_act seconds, repeat."""
import hashlib
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from crossvote.analysis.policy import DecisionRecord, Policy
from crossvote.config.scenarios import demand_id_for
from crossvote.scoring.metrics import MetricsReport, metrics
from crossvote.sim.models import ScenarioConfig
from crossvote.sim.telemetry import Telemetry, TelemetryRecorder
from crossvote.sim.world import init_scenario, switch_rate

logger = logging.getLogger(__name__)

NO_VOTE_RULE = "none"


@dataclass
class EpisodeLog:
    scenario: str
    seed: int
    policy: str
    vote_rule: str
    preference_split: float
    records: List[DecisionRecord] = field(default_factory=list)
    telemetry: Optional[Telemetry] = None

    @property
    def actions(self) -> np.ndarray:
        return np.array([r.action for r in self.records], dtype=np.int64)

    @property
    def switch_rate(self) -> float:
        return switch_rate(self.actions)

    def metrics(self) -> MetricsReport:
        return metrics(self)

    def digest(self) -> str:
        """sha256 over every decision and telemetry array, for determinism checks."""
        h = hashlib.sha256()
        h.update(f"{self.scenario}|{self.seed}|{self.policy}|{self.vote_rule}|{self.preference_split!r}".encode())
        for r in self.records:
            h.update(np.array([r.clock, r.incumbent, r.action, r.votes_stops, r.votes_wait], dtype=np.int64).tobytes())
            h.update(np.asarray(r.obs, dtype=np.float64).tobytes())
            h.update(np.asarray(r.q_integrated, dtype=np.float64).tobytes())
        if self.telemetry is not None:
            for arr in (self.telemetry.clock, self.telemetry.phase, self.telemetry.speed_sum,
                        self.telemetry.vehicle_count, self.telemetry.new_stops,
                        self.telemetry.stopped_seconds):
                h.update(np.ascontiguousarray(arr).tobytes())
        return h.hexdigest()


def run_episode(cfg: ScenarioConfig, policy: Policy, scenario: Optional[str] = None) -> EpisodeLog:
    """Run cfg.horizon_steps seconds under the policy, deciding every t_act seconds."""
    policy.reset()
    world = init_scenario(cfg)
    recorder = TelemetryRecorder(world)

    for _ in range(cfg.n_decisions):
        world.set_phase(policy.decide(world))
        for _ in range(cfg.t_act):
            world.tick()
            recorder.record()
        world.drain_interval_events()

    log = EpisodeLog(
        scenario=scenario if scenario is not None else demand_id_for(cfg.n_ns, cfg.n_we),
        seed=cfg.seed,
        policy=policy.policy_id,
        vote_rule=getattr(policy, "rule", NO_VOTE_RULE),
        preference_split=cfg.preference_split,
        records=list(policy.records),
        telemetry=recorder.telemetry(),
    )
    logger.debug("episode %s seed=%d policy=%s: %d decisions", log.scenario, log.seed, log.policy, len(log.records))
    return log
