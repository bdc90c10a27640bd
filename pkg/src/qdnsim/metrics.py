"""Fairness, utilization, throughput, and sawtooth statistics over traces."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MetricUndefinedError
from .engine import RunResult

#: Fraction of slots discarded before steady-state statistics by default.
DEFAULT_WARMUP_FRACTION = 0.25


def jain(values: list[float], trim_top: float = 0.0) -> float:
    """Jain's fairness index: (sum w)^2 / (N * sum w^2); 1 means equality.

    ``trim_top`` optionally drops that fraction of the largest values first
    (sessions routed onto lightly loaded paths would otherwise dominate).
    """
    if not values:
        raise MetricUndefinedError("fairness of an empty list is undefined")
    if any(v < 0 for v in values):
        raise ValueError("window averages must be non-negative")
    if trim_top:
        drop = int(len(values) * trim_top)
        if drop:
            values = sorted(values)[:-drop]
    if all(v == 0 for v in values):
        raise MetricUndefinedError("fairness of all-zero windows is undefined")
    total = sum(values)
    return (total * total) / (len(values) * sum(v * v for v in values))


def utilization(result: RunResult, node: int, pool: str) -> list[float]:
    """Per-slot reserved/capacity for one pool, in [0, 1]."""
    series = [
        row.reserved / row.capacity
        for row in result.pool_rows
        if row.node == node and row.pool == pool and row.capacity > 0
    ]
    if not series:
        raise MetricUndefinedError(
            f"no recorded occupancy for a nonzero-capacity {pool} pool at "
            f"node {node}"
        )
    return series


def effective_window(result: RunResult, session: int) -> list[int]:
    """Per-slot minimum window across a flow's hop sessions."""
    per_slot: dict[int, int] = {}
    for row in result.session_rows:
        if row.session != session:
            continue
        per_slot[row.slot] = min(per_slot.get(row.slot, row.window), row.window)
    return [per_slot[slot] for slot in sorted(per_slot)]


def window_series(result: RunResult, session: int, hop: int = 0) -> list[int]:
    """Announced window per slot for one session (one hop of a flow)."""
    return [
        row.window
        for row in result.session_rows
        if row.session == session and row.hop == hop
    ]


@dataclass(frozen=True)
class SteadyStats:
    minimum: float
    maximum: float
    mean: float
    period: float | None  # None when the series has no repeating peaks


def steady_state_stats(series: list[float], warmup: int) -> SteadyStats:
    """Statistics over the post-warmup suffix of a window series.

    The sawtooth period is estimated from the spacing of successive local
    maxima (points from which the series next moves downward).
    """
    if warmup >= len(series):
        raise ValueError("series must be longer than the warmup")
    suffix = series[warmup:]
    peaks = [
        i for i in range(len(suffix) - 1)
        if suffix[i] > suffix[i + 1]
        and (i == 0 or suffix[i] >= suffix[i - 1])
    ]
    period = None
    if len(peaks) >= 2:
        gaps = [b - a for a, b in zip(peaks, peaks[1:])]
        period = sum(gaps) / len(gaps)
    return SteadyStats(
        minimum=min(suffix),
        maximum=max(suffix),
        mean=sum(suffix) / len(suffix),
        period=period,
    )


def idle_fraction(result: RunResult, node: int, pool: str, warmup: int) -> float:
    """Largest post-warmup fraction of an occupied pool left unreserved."""
    series = utilization(result, node, pool)
    if warmup >= len(series):
        raise ValueError("utilization series must be longer than the warmup")
    return max(1.0 - u for u in series[warmup:])


@dataclass(frozen=True)
class ThroughputReport:
    total: int
    per_slot: float
    per_time: float


def throughput(result: RunResult) -> ThroughputReport:
    """Delivered qubits in total, per slot, and per abstract time unit."""
    total = result.summary["delivered_total"]
    per_slot = total / result.n_slots if result.n_slots else 0.0
    return ThroughputReport(
        total=total,
        per_slot=per_slot,
        per_time=per_slot / result.slot_length,
    )


def mean_windows(result: RunResult) -> dict[int, float]:
    """Per-session mean effective window over the session's active slots."""
    return {
        sid: info["mean_window"]
        for sid, info in result.summary["sessions"].items()
    }
