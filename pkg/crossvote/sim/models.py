"""Domain types of the two-road intersection simulation."""
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .constants import (
    ACCEL_MPS2, APPROACH_LENGTH_M, DECEL_MPS2, DEFAULT_DEMAND, HORIZON_STEPS,
    LOOP_LENGTH_M, MIN_GAP_M, N_SEGMENTS, PREFERENCE_SPLIT,
    STOP_SPEED_THRESHOLD_MPS, T_ACT, V_MAX_MPS, VEHICLE_LENGTH_M,
)

# Occupancy vector: NS bins near→far, then WE bins near→far
Observation = np.ndarray


class Road(IntEnum):
    NS = 0
    WE = 1


class Phase(IntEnum):
    """Signal phase; the value doubles as the agent's action index."""
    NS_GREEN = 0
    WE_GREEN = 1

    @property
    def green_road(self) -> Road:
        return Road(int(self))


class Preference(str, Enum):
    STOPS = "stops"
    WAIT = "wait"


class ScenarioConfig(BaseModel):
    """Physical scenario plus demand, preference split and seed."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_ns: int = Field(DEFAULT_DEMAND[0], ge=0)
    n_we: int = Field(DEFAULT_DEMAND[1], ge=0)
    horizon_steps: int = Field(HORIZON_STEPS, gt=0)
    t_act: int = Field(T_ACT, gt=0)
    loop_length_m: float = Field(LOOP_LENGTH_M, gt=0)
    approach_length_m: float = Field(APPROACH_LENGTH_M, gt=0)
    n_segments: int = Field(N_SEGMENTS, gt=0)
    v_max_mps: float = Field(V_MAX_MPS, gt=0)
    accel_mps2: float = Field(ACCEL_MPS2, gt=0)
    decel_mps2: float = Field(DECEL_MPS2, gt=0)
    vehicle_length_m: float = Field(VEHICLE_LENGTH_M, gt=0)
    min_gap_m: float = Field(MIN_GAP_M, gt=0)
    stop_speed_threshold_mps: float = Field(STOP_SPEED_THRESHOLD_MPS, gt=0)
    preference_split: float = Field(PREFERENCE_SPLIT, ge=0.0, le=1.0)
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_geometry(self) -> "ScenarioConfig":
        spacing = self.vehicle_length_m + self.min_gap_m
        for name, count in (("n_ns", self.n_ns), ("n_we", self.n_we)):
            if count * spacing >= self.loop_length_m:
                raise ValueError(
                    f"{name}={count} vehicles need {count * spacing:.1f} m "
                    f"but the loop is {self.loop_length_m} m"
                )
        if self.approach_length_m > self.loop_length_m:
            raise ValueError("approach_length_m must not exceed loop_length_m")
        if self.horizon_steps % self.t_act != 0:
            raise ValueError("horizon_steps must be a multiple of t_act")
        return self

    @property
    def fleet_size(self) -> int:
        return self.n_ns + self.n_we

    @property
    def segment_length_m(self) -> float:
        return self.approach_length_m / self.n_segments

    @property
    def n_decisions(self) -> int:
        return self.horizon_steps // self.t_act

    @property
    def obs_dim(self) -> int:
        return 2 * self.n_segments

    def replace(self, **changes) -> "ScenarioConfig":
        """Validated copy with some fields changed."""
        return type(self).model_validate({**self.model_dump(), **changes})


@dataclass(slots=True)
class VehicleState:
    id: int
    road: Road
    dist_to_stopline_m: float
    speed_mps: float
    preference: Preference
    stop_count: int = 0
    wait_time_s: float = 0.0
    is_stopped: bool = True


@dataclass(frozen=True)
class VoteTally:
    """Preferences of the vehicles currently on the upstream approaches."""
    votes_stops: int = 0
    votes_wait: int = 0

    def __post_init__(self):
        if self.votes_stops < 0 or self.votes_wait < 0:
            raise ValueError("vote counts must be non-negative")

    @property
    def polled(self) -> int:
        return self.votes_stops + self.votes_wait

    @property
    def stops_share(self) -> float:
        return self.votes_stops / self.polled if self.polled else 0.5

    def counts(self) -> Dict[str, int]:
        return {Preference.STOPS.value: self.votes_stops, Preference.WAIT.value: self.votes_wait}


@dataclass(frozen=True)
class IntervalEvents:
    """Stop events and stopped seconds per vehicle since the previous drain."""
    new_stops_by_vehicle: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    stopped_seconds_by_vehicle: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def new_stops(self) -> int:
        return int(self.new_stops_by_vehicle.sum())

    @property
    def stopped_seconds(self) -> float:
        return float(self.stopped_seconds_by_vehicle.sum())
