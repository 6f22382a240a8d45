"""Deterministic two-road intersection microsimulation.

Two one-way loop roads (North–South and West–East) cross at a single
signalized point. Positions are measured as the distance from a vehicle's
front to the stop line ahead of it, so a vehicle crossing the line wraps
from ~0 m to ~loop_length m.

Car following uses a discrete-time safe-speed rule: the speed chosen for
the next second must leave room to stop behind the leader (or behind the
stop line under red) with the comfortable deceleration bound. Two hard
caps back that rule up, so overlap and red-light running are impossible
even when the comfortable bound would be violated.
"""
import logging
import math
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from crossvote.errors import ConfigError, PlacementError

from .constants import DT, MAX_PLACEMENT_RETRIES
from .models import (
    IntervalEvents, Observation, Phase, Preference, Road, ScenarioConfig,
    VehicleState, VoteTally,
)

logger = logging.getLogger(__name__)


def _safe_speed(gap_m: float, leader_speed: float, decel: float, dt: float = DT) -> float:
    """Largest v with v·dt + v²/2b ≤ gap + v_leader²/2b (0 if none)."""
    budget = gap_m + leader_speed * leader_speed / (2.0 * decel)
    if budget <= 0.0:
        return 0.0
    return decel * (-dt + math.sqrt(dt * dt + 2.0 * budget / decel))


class SimWorld:
    """Full simulation state: vehicles, signal phase, clock and RNG stream."""

    def __init__(self, cfg: ScenarioConfig, vehicles: List[VehicleState],
                 rng: Optional[np.random.Generator] = None):
        self.cfg = cfg
        self.vehicles = vehicles
        self.phase = Phase.NS_GREEN
        self.clock = 0
        self.rng = rng if rng is not None else np.random.default_rng(cfg.seed)
        n = len(vehicles)
        self._acc_new_stops = np.zeros(n, dtype=np.int64)
        self._acc_stopped_s = np.zeros(n)

    # ------------------------------------------------------------------
    # Construction
    # ------------------------------------------------------------------

    @classmethod
    def from_config(cls, cfg: ScenarioConfig) -> "SimWorld":
        """Seeded random placement and preference assignment."""
        rng = np.random.default_rng(cfg.seed)
        positions = {
            Road.NS: cls._place_on_loop(cfg, cfg.n_ns, rng),
            Road.WE: cls._place_on_loop(cfg, cfg.n_we, rng),
        }

        fleet = cfg.fleet_size
        n_stops = int(round(cfg.preference_split * fleet))
        order = rng.permutation(fleet)
        prefers_stops = np.zeros(fleet, dtype=bool)
        prefers_stops[order[:n_stops]] = True

        vehicles = []
        vid = 0
        for road in (Road.NS, Road.WE):
            for dist in positions[road]:
                pref = Preference.STOPS if prefers_stops[vid] else Preference.WAIT
                vehicles.append(VehicleState(
                    id=vid, road=road, dist_to_stopline_m=float(dist),
                    speed_mps=0.0, preference=pref,
                ))
                vid += 1
        return cls(cfg, vehicles, rng)

    @classmethod
    def with_vehicles(
        cls,
        cfg: ScenarioConfig,
        placements: Iterable[Tuple[Road, float, float, Preference]],
    ) -> "SimWorld":
        """Hand-built world from (road, dist, speed, preference) tuples."""
        vehicles = []
        for vid, (road, dist, speed, pref) in enumerate(placements):
            vehicles.append(VehicleState(
                id=vid, road=Road(road), dist_to_stopline_m=float(dist) % cfg.loop_length_m,
                speed_mps=float(speed), preference=Preference(pref),
                is_stopped=float(speed) < cfg.stop_speed_threshold_mps,
            ))
        return cls(cfg, vehicles)

    @staticmethod
    def _place_on_loop(cfg: ScenarioConfig, count: int, rng: np.random.Generator) -> np.ndarray:
        """
        Uniform non-overlapping placement: draw sorted points on the loop
        shortened by count·spacing, re-insert one spacing per vehicle, then
        rotate by a uniform offset.
        """
        if count == 0:
            return np.zeros(0)
        spacing = cfg.vehicle_length_m + cfg.min_gap_m
        free = cfg.loop_length_m - count * spacing
        if free <= 0:
            raise PlacementError(f"{count} vehicles do not fit on a {cfg.loop_length_m} m loop")

        for _ in range(MAX_PLACEMENT_RETRIES):
            points = np.sort(rng.uniform(0.0, free, size=count)) + spacing * np.arange(count)
            positions = np.sort((points + rng.uniform(0.0, cfg.loop_length_m)) % cfg.loop_length_m)
            gaps = np.diff(np.append(positions, positions[0] + cfg.loop_length_m))
            if count == 1 or np.all(gaps >= spacing - 1e-9):
                return positions
        raise PlacementError(f"could not place {count} vehicles after {MAX_PLACEMENT_RETRIES} attempts")

    # ------------------------------------------------------------------
    # Signal
    # ------------------------------------------------------------------

    def set_phase(self, phase: Phase) -> None:
        self.phase = Phase(phase)

    # ------------------------------------------------------------------
    # Dynamics
    # ------------------------------------------------------------------

    def road_vehicles(self, road: Road) -> List[VehicleState]:
        """Vehicles of one road, nearest to the stop line first."""
        return sorted(
            (v for v in self.vehicles if v.road == road),
            key=lambda v: (v.dist_to_stopline_m, v.id),
        )

    def tick(self) -> None:
        """Advance the world by one second."""
        for road in (Road.NS, Road.WE):
            red = self.phase.green_road != road
            ordered = self._update_order(self.road_vehicles(road))
            n = len(ordered)
            for i, veh in enumerate(ordered):
                leader = ordered[i - 1] if n > 1 else None
                self._advance(veh, leader, red)
        self.clock += 1

    def _update_order(self, ordered: List[VehicleState]) -> List[VehicleState]:
        """
        Rotate a road's vehicles so the update starts behind the widest gap.

        Every vehicle then follows a leader that has already moved this tick,
        except the first one, whose leader is the widest gap away.
        """
        if len(ordered) < 2:
            return ordered
        dist = np.array([v.dist_to_stopline_m for v in ordered])
        gaps = (dist - np.roll(dist, 1)) % self.cfg.loop_length_m
        start = int(np.argmax(gaps))
        return ordered[start:] + ordered[:start]

    def _advance(self, veh: VehicleState, leader: Optional[VehicleState], red: bool) -> None:
        cfg = self.cfg
        v = veh.speed_mps
        desired = min(v + cfg.accel_mps2 * DT, cfg.v_max_mps)
        hard_cap = cfg.v_max_mps

        if leader is not None:
            # Leader ahead on the loop (already moved this tick unless it heads the order)
            gap = (veh.dist_to_stopline_m - leader.dist_to_stopline_m) % cfg.loop_length_m
            gap -= cfg.vehicle_length_m
            room = gap - cfg.min_gap_m
            desired = min(desired, _safe_speed(room, leader.speed_mps, cfg.decel_mps2))
            hard_cap = min(hard_cap, max(0.0, room) / DT)

        if red:
            line = veh.dist_to_stopline_m
            desired = min(desired, _safe_speed(line, 0.0, cfg.decel_mps2))
            hard_cap = min(hard_cap, line / DT)

        new_speed = max(desired, v - cfg.decel_mps2 * DT, 0.0)
        new_speed = max(0.0, min(new_speed, hard_cap))

        veh.speed_mps = new_speed
        veh.dist_to_stopline_m = (veh.dist_to_stopline_m - new_speed * DT) % cfg.loop_length_m

        stopped = new_speed < cfg.stop_speed_threshold_mps
        if stopped and not veh.is_stopped:
            veh.stop_count += 1
            self._acc_new_stops[veh.id] += 1
        if stopped:
            veh.wait_time_s += DT
            self._acc_stopped_s[veh.id] += DT
        veh.is_stopped = stopped

    # ------------------------------------------------------------------
    # Observation, polling, accounting
    # ------------------------------------------------------------------

    def observe(self) -> Observation:
        cfg = self.cfg
        seg = cfg.segment_length_m
        occupancy = np.zeros(cfg.obs_dim)
        for veh in self.vehicles:
            d = veh.dist_to_stopline_m
            if d >= cfg.approach_length_m:
                continue
            bin_idx = min(int(d // seg), cfg.n_segments - 1)
            occupancy[int(veh.road) * cfg.n_segments + bin_idx] += cfg.vehicle_length_m
        return np.clip(occupancy / seg, 0.0, 1.0)

    def poll_voters(self) -> VoteTally:
        stops = wait = 0
        for veh in self.vehicles:
            if veh.dist_to_stopline_m < self.cfg.approach_length_m:
                if veh.preference == Preference.STOPS:
                    stops += 1
                else:
                    wait += 1
        return VoteTally(votes_stops=stops, votes_wait=wait)

    def drain_interval_events(self) -> IntervalEvents:
        events = IntervalEvents(
            new_stops_by_vehicle=self._acc_new_stops.copy(),
            stopped_seconds_by_vehicle=self._acc_stopped_s.copy(),
        )
        self._acc_new_stops[:] = 0
        self._acc_stopped_s[:] = 0.0
        return events

    # ------------------------------------------------------------------
    # Inspection helpers
    # ------------------------------------------------------------------

    def road_counts(self) -> Tuple[int, int]:
        ns = sum(1 for v in self.vehicles if v.road == Road.NS)
        return ns, len(self.vehicles) - ns

    def min_gap(self) -> float:
        """Smallest bumper-to-bumper gap over both roads (inf if < 2 vehicles per road)."""
        smallest = math.inf
        for road in (Road.NS, Road.WE):
            ordered = self.road_vehicles(road)
            if len(ordered) < 2:
                continue
            for i, veh in enumerate(ordered):
                leader = ordered[i - 1]
                gap = (veh.dist_to_stopline_m - leader.dist_to_stopline_m) % self.cfg.loop_length_m
                smallest = min(smallest, gap - self.cfg.vehicle_length_m)
        return smallest

    def positions(self, road: Road) -> List[float]:
        return [v.dist_to_stopline_m for v in self.vehicles if v.road == road]


# ---------------------------------------------------------------------------
# Functional surface
# ---------------------------------------------------------------------------

def init_scenario(cfg: ScenarioConfig) -> SimWorld:
    if not isinstance(cfg, ScenarioConfig):
        raise ConfigError(f"expected ScenarioConfig, got {type(cfg).__name__}")
    world = SimWorld.from_config(cfg)
    logger.debug("Initialized scenario n_ns=%d n_we=%d seed=%d", cfg.n_ns, cfg.n_we, cfg.seed)
    return world


def set_phase(world: SimWorld, phase: Phase) -> None:
    world.set_phase(phase)


def tick(world: SimWorld) -> None:
    world.tick()


def observe(world: SimWorld) -> Observation:
    return world.observe()


def poll_voters(world: SimWorld) -> VoteTally:
    return world.poll_voters()


def drain_interval_events(world: SimWorld) -> IntervalEvents:
    return world.drain_interval_events()


def switch_count(phases: Sequence[int], initial: int = int(Phase.NS_GREEN)) -> int:
    """Number of decisions whose phase differs from the one in force before it."""
    if len(phases) == 0:
        return 0
    previous = np.concatenate(([initial], np.asarray(phases[:-1])))
    return int(np.count_nonzero(np.asarray(phases) != previous))


def switch_rate(phases: Sequence[int], initial: int = int(Phase.NS_GREEN)) -> float:
    if len(phases) == 0:
        return 0.0
    return switch_count(phases, initial) / len(phases)


def load_scenario_file(path) -> ScenarioConfig:
    """Read a ScenarioConfig from a `key = value` file."""
    from crossvote.config.loader import build_model, read_config_file, split_by_model

    values = split_by_model(read_config_file(path), {"scenario": ScenarioConfig})["scenario"]
    return build_model(ScenarioConfig, values)
