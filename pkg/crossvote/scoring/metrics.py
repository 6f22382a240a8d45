"""Evaluation metrics: mean speed, total stops and mean wait per vehicle."""
from dataclasses import asdict, dataclass
from typing import Any, Dict, Union

import numpy as np

from crossvote.errors import EmptyTraceError
from crossvote.sim.telemetry import Telemetry


@dataclass(frozen=True)
class MetricsReport:
    mean_speed_mps: float
    total_stops: int
    mean_wait_s: float
    ns_mean_speed_mps: float
    we_mean_speed_mps: float
    ns_total_stops: int
    we_total_stops: int
    ns_mean_wait_s: float
    we_mean_wait_s: float
    # Aggregation weights
    speed_samples: int = 0
    ns_speed_samples: int = 0
    we_speed_samples: int = 0
    ns_fleet: int = 0
    we_fleet: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _ratio(num: float, den: float) -> float:
    return float(num) / float(den) if den else 0.0


def metrics(trace: Union[Telemetry, Any]) -> MetricsReport:
    """
    Metrics of a trace (an EpisodeLog or its Telemetry). Speed is averaged
    over every (vehicle, second) sample; wait is total stopped seconds per
    vehicle.
    """
    tel: Telemetry = getattr(trace, "telemetry", trace)
    if len(tel) == 0:
        raise EmptyTraceError("cannot compute metrics of an empty trace")

    speed = tel.speed_sum.sum(axis=0)
    samples = tel.vehicle_count.sum(axis=0)
    stops = tel.new_stops.sum(axis=0)
    wait = tel.stopped_seconds.sum(axis=0)
    ns_fleet, we_fleet = int(tel.fleet[0]), int(tel.fleet[1])

    return MetricsReport(
        mean_speed_mps=_ratio(speed.sum(), samples.sum()),
        total_stops=int(stops.sum()),
        mean_wait_s=_ratio(wait.sum(), ns_fleet + we_fleet),
        ns_mean_speed_mps=_ratio(speed[0], samples[0]),
        we_mean_speed_mps=_ratio(speed[1], samples[1]),
        ns_total_stops=int(stops[0]),
        we_total_stops=int(stops[1]),
        ns_mean_wait_s=_ratio(wait[0], ns_fleet),
        we_mean_wait_s=_ratio(wait[1], we_fleet),
        speed_samples=int(samples.sum()),
        ns_speed_samples=int(samples[0]),
        we_speed_samples=int(samples[1]),
        ns_fleet=ns_fleet,
        we_fleet=we_fleet,
    )


def combine_reports(a: MetricsReport, b: MetricsReport) -> MetricsReport:
    """Metrics of two consecutive stretches of the same fleet's run."""
    def weighted(x: float, wx: int, y: float, wy: int) -> float:
        return _ratio(x * wx + y * wy, wx + wy)

    return MetricsReport(
        mean_speed_mps=weighted(a.mean_speed_mps, a.speed_samples, b.mean_speed_mps, b.speed_samples),
        total_stops=a.total_stops + b.total_stops,
        mean_wait_s=a.mean_wait_s + b.mean_wait_s,
        ns_mean_speed_mps=weighted(a.ns_mean_speed_mps, a.ns_speed_samples,
                                   b.ns_mean_speed_mps, b.ns_speed_samples),
        we_mean_speed_mps=weighted(a.we_mean_speed_mps, a.we_speed_samples,
                                   b.we_mean_speed_mps, b.we_speed_samples),
        ns_total_stops=a.ns_total_stops + b.ns_total_stops,
        we_total_stops=a.we_total_stops + b.we_total_stops,
        ns_mean_wait_s=a.ns_mean_wait_s + b.ns_mean_wait_s,
        we_mean_wait_s=a.we_mean_wait_s + b.we_mean_wait_s,
        speed_samples=a.speed_samples + b.speed_samples,
        ns_speed_samples=a.ns_speed_samples + b.ns_speed_samples,
        we_speed_samples=a.we_speed_samples + b.we_speed_samples,
        ns_fleet=a.ns_fleet,
        we_fleet=a.we_fleet,
    )


def cumulative_series(tel: Telemetry) -> Dict[str, np.ndarray]:
    """Cumulative stops / wait and per-road mean speed for trace export."""
    counts = np.where(tel.vehicle_count > 0, tel.vehicle_count, 1)
    return {
        "ns_mean_speed_mps": tel.speed_sum[:, 0] / counts[:, 0],
        "we_mean_speed_mps": tel.speed_sum[:, 1] / counts[:, 1],
        "cumulative_stops": np.cumsum(tel.new_stops.sum(axis=1)),
        "cumulative_wait_s": np.cumsum(tel.stopped_seconds.sum(axis=1)),
    }
