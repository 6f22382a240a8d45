"""Per-second vehicle telemetry recorded alongside an episode."""
from dataclasses import dataclass, field
from typing import List, NamedTuple

import numpy as np

from .world import SimWorld


@dataclass
class Telemetry:
    """
    One row per simulated second. Per-road columns are indexed by Road
    (0 = NS, 1 = WE).
    """
    clock: np.ndarray
    phase: np.ndarray
    speed_sum: np.ndarray        # (T, 2) sum of speeds on each road
    vehicle_count: np.ndarray    # (T, 2)
    new_stops: np.ndarray        # (T, 2) stop events in that second
    stopped_seconds: np.ndarray  # (T, 2) stopped vehicle-seconds in that second
    fleet: np.ndarray = field(default_factory=lambda: np.zeros(2, dtype=np.int64))

    def __len__(self) -> int:
        return len(self.clock)

    def split(self, at: int) -> "tuple[Telemetry, Telemetry]":
        """Split into seconds [0, at) and [at, T)."""
        def part(sl: slice) -> "Telemetry":
            return Telemetry(
                clock=self.clock[sl], phase=self.phase[sl],
                speed_sum=self.speed_sum[sl], vehicle_count=self.vehicle_count[sl],
                new_stops=self.new_stops[sl], stopped_seconds=self.stopped_seconds[sl],
                fleet=self.fleet.copy(),
            )
        return part(slice(0, at)), part(slice(at, None))

    @staticmethod
    def concat(first: "Telemetry", second: "Telemetry") -> "Telemetry":
        return Telemetry(
            clock=np.concatenate([first.clock, second.clock]),
            phase=np.concatenate([first.phase, second.phase]),
            speed_sum=np.concatenate([first.speed_sum, second.speed_sum]),
            vehicle_count=np.concatenate([first.vehicle_count, second.vehicle_count]),
            new_stops=np.concatenate([first.new_stops, second.new_stops]),
            stopped_seconds=np.concatenate([first.stopped_seconds, second.stopped_seconds]),
            fleet=first.fleet.copy(),
        )


class TelemetryRow(NamedTuple):
    """One recorded second; per-road arrays are indexed by Road."""
    clock: int
    phase: int
    speed_sum: np.ndarray
    vehicle_count: np.ndarray
    new_stops: np.ndarray
    stopped_seconds: np.ndarray


class TelemetryRecorder:
    """Collects one telemetry row after every tick of a world."""

    def __init__(self, world: SimWorld):
        self.world = world
        self._rows: List[TelemetryRow] = []
        self._prev_stops = np.zeros(2, dtype=np.int64)
        self._prev_wait = np.zeros(2)
        ns, we = world.road_counts()
        self.fleet = np.array([ns, we], dtype=np.int64)
        for veh in world.vehicles:
            self._prev_stops[int(veh.road)] += veh.stop_count
            self._prev_wait[int(veh.road)] += veh.wait_time_s

    def record(self) -> TelemetryRow:
        speed = np.zeros(2)
        count = np.zeros(2, dtype=np.int64)
        stops = np.zeros(2, dtype=np.int64)
        wait = np.zeros(2)
        for veh in self.world.vehicles:
            r = int(veh.road)
            speed[r] += veh.speed_mps
            count[r] += 1
            stops[r] += veh.stop_count
            wait[r] += veh.wait_time_s
        row = TelemetryRow(
            self.world.clock, int(self.world.phase), speed, count,
            stops - self._prev_stops, wait - self._prev_wait,
        )
        self._rows.append(row)
        self._prev_stops = stops
        self._prev_wait = wait
        return row

    def telemetry(self) -> Telemetry:
        if not self._rows:
            return Telemetry(
                clock=np.zeros(0, dtype=np.int64), phase=np.zeros(0, dtype=np.int64),
                speed_sum=np.zeros((0, 2)), vehicle_count=np.zeros((0, 2), dtype=np.int64),
                new_stops=np.zeros((0, 2), dtype=np.int64), stopped_seconds=np.zeros((0, 2)),
                fleet=self.fleet.copy(),
            )
        clock, phase, speed, count, stops, wait = zip(*self._rows)
        return Telemetry(
            clock=np.asarray(clock, dtype=np.int64),
            phase=np.asarray(phase, dtype=np.int64),
            speed_sum=np.vstack(speed),
            vehicle_count=np.vstack(count),
            new_stops=np.vstack(stops),
            stopped_seconds=np.vstack(wait),
            fleet=self.fleet.copy(),
        )


def record_telemetry(recorder: TelemetryRecorder) -> TelemetryRow:
    """Record the current second of the recorder's world; the full trace is recorder.telemetry()."""
    return recorder.record()
