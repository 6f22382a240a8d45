"""Two-road signalized intersection microsimulation."""
from .models import (
    IntervalEvents, Observation, Phase, Preference, Road, ScenarioConfig,
    VehicleState, VoteTally,
)
from .telemetry import Telemetry, TelemetryRecorder, TelemetryRow, record_telemetry
from .world import (
    SimWorld, drain_interval_events, init_scenario, observe, poll_voters,
    load_scenario_file, set_phase, switch_count, switch_rate, tick,
)

__all__ = [
    "IntervalEvents", "Observation", "Phase", "Preference", "Road",
    "ScenarioConfig", "VehicleState", "VoteTally", "Telemetry",
    "TelemetryRecorder", "TelemetryRow", "record_telemetry", "SimWorld",
    "drain_interval_events", "init_scenario", "load_scenario_file", "observe",
    "poll_voters", "set_phase", "switch_count", "switch_rate", "tick",
]
