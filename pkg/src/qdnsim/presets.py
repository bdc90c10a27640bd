"""Experiment presets: canned configuration sweeps with summary tables.

Each preset is a pure generator of run configurations plus a summarizer
that reduces the finished runs to flat tables (one per output file).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .engine import Protocol, RunConfig, RunResult, SessionSpec, WaxmanSpec
from .errors import ConfigError
from .metrics import idle_fraction, jain, utilization, window_series
from .topology import NetworkKind, Node, NodeKind, Topology

MICRO_SESSIONS = 5
MICRO_RECEIVE_POOL = 100
MICRO_SLOTS = 200
MICRO_TELE_WINDOWS = [1, 4, 8, 16, 24]

SWEEP_SLOTS = 200
SWEEP_SESSIONS = 100
SWEEP_INFRA = 50
# Strongly geometric graphs (short-range edges) reproduce the contention
# heterogeneity the wide-area comparisons depend on; degree stays at 4.
SWEEP_ALPHA = 0.06
NET_SIZES = [40, 50, 60, 70]
WORKLOADS = [150, 200, 250]
PROB_GRID = [0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95, 1.00]
TRADEOFF_P = 0.65
RATIO_GRID = [1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0]

TELE_PROTOCOLS = [Protocol.TELE, Protocol.EW, Protocol.FRA]


@dataclass(frozen=True)
class PresetRun:
    label: str
    config: RunConfig


@dataclass(frozen=True)
class Preset:
    name: str
    build: Callable[[list[int]], list[PresetRun]]
    summarize: Callable[[dict[str, RunResult]], dict[str, list[dict]]]


def many_to_one_topology(
    n_ingress: int,
    network: NetworkKind,
    ingress_capacity: int,
    hub_capacity: int,
    egress_capacity: int,
) -> Topology:
    """n ingress hosts feeding one egress host through a single hub."""
    if network is NetworkKind.TAG_SWITCH:
        hub_kind, hub_capacity = NodeKind.SWITCH, 0
    elif network is NetworkKind.TAG_RELAY:
        hub_kind = NodeKind.RELAY
    else:
        hub_kind = NodeKind.REPEATER
    nodes = [Node(0, hub_kind, 0.0, 0.0, hub_capacity)]
    edges = []
    for i in range(1, n_ingress + 1):
        nodes.append(Node(i, NodeKind.HOST, float(i), 0.0, ingress_capacity))
        edges.append((0, i))
    egress = n_ingress + 1
    nodes.append(Node(egress, NodeKind.HOST, 0.0, 1.0, egress_capacity))
    edges.append((0, egress))
    return Topology(network, nodes, edges)


def micro_egress_node() -> int:
    return MICRO_SESSIONS + 1


def micro_tele_config(seed: int) -> RunConfig:
    """Five long-lived sessions, staggered initial windows, one egress
    whose 100-unit receive pool is the only bottleneck."""
    topology = many_to_one_topology(
        MICRO_SESSIONS, NetworkKind.TELE,
        ingress_capacity=30_000, hub_capacity=100_000,
        egress_capacity=3 * MICRO_RECEIVE_POOL,
    )
    egress = micro_egress_node()
    sessions = [
        SessionSpec(src=i + 1, dst=egress, initial_window=w)
        for i, w in enumerate(MICRO_TELE_WINDOWS)
    ]
    return RunConfig(
        seed=seed, protocol=Protocol.TELE, network=NetworkKind.TELE,
        topology=topology, sessions=sessions, n_slots=MICRO_SLOTS,
    )


def micro_tag_config(seed: int) -> RunConfig:
    """Same many-to-one shape on an all-optical switch network: one hop
    per session, every window starting from 2 in slow start."""
    # 9/13 of 325 leaves exactly 100 receive units at the egress host.
    topology = many_to_one_topology(
        MICRO_SESSIONS, NetworkKind.TAG_SWITCH,
        ingress_capacity=13_000, hub_capacity=0,
        egress_capacity=325,
    )
    egress = micro_egress_node()
    sessions = [SessionSpec(src=i + 1, dst=egress) for i in range(MICRO_SESSIONS)]
    return RunConfig(
        seed=seed, protocol=Protocol.TAG, network=NetworkKind.TAG_SWITCH,
        topology=topology, sessions=sessions, n_slots=MICRO_SLOTS, p=1.0,
    )


def _sweep_config(seed, protocol, n_infra, n_sessions, p=1.0, slot_length=1.0):
    network = (
        NetworkKind.TAG_RELAY if protocol is Protocol.TAG else NetworkKind.TELE
    )
    return RunConfig(
        seed=seed, protocol=protocol, network=network,
        topology=WaxmanSpec(n_infra=n_infra, alpha=SWEEP_ALPHA),
        sessions=n_sessions, n_slots=SWEEP_SLOTS, p=p, slot_length=slot_length,
    )


def _switch_config(seed, p, n_infra=SWEEP_INFRA, n_sessions=SWEEP_SESSIONS):
    return RunConfig(
        seed=seed, protocol=Protocol.TAG, network=NetworkKind.TAG_SWITCH,
        topology=WaxmanSpec(n_infra=n_infra, alpha=SWEEP_ALPHA),
        sessions=n_sessions, n_slots=SWEEP_SLOTS, p=p,
    )


# -- appendix-style micro benchmark -------------------------------------


def _build_micro(seeds: list[int]) -> list[PresetRun]:
    runs = []
    for seed in seeds:
        runs.append(PresetRun(f"tele_seed{seed}", micro_tele_config(seed)))
        runs.append(PresetRun(f"tag_seed{seed}", micro_tag_config(seed)))
    return runs


def micro_metrics(result: RunResult) -> dict:
    """Fairness, utilization, and idle metrics for one many-to-one run."""
    egress = micro_egress_node()
    means = []
    for sid in sorted(result.paths):
        series = window_series(result, sid)[:100]
        means.append(sum(series) / len(series))
    series = utilization(result, egress, "receive")
    return {
        "jain_first_100": jain(means),
        "min_utilization_after_10": min(series[10:]),
        "max_idle_after_10": idle_fraction(result, egress, "receive", 10),
        "mean_windows": means,
    }


def _summarize_micro(results: dict[str, RunResult]) -> dict[str, list[dict]]:
    rows = []
    for label in sorted(results):
        result = results[label]
        metrics = micro_metrics(result)
        rows.append({
            "run": label,
            "protocol": result.protocol,
            "seed": result.seed,
            "jain_first_100": metrics["jain_first_100"],
            "min_utilization_after_10": metrics["min_utilization_after_10"],
            "max_idle_after_10": metrics["max_idle_after_10"],
            "delivered_total": result.summary["delivered_total"],
        })
    return {"summary": rows}


# -- wide-area sweeps ----------------------------------------------------


def _build_net_size(seeds: list[int]) -> list[PresetRun]:
    runs = []
    for n_infra in NET_SIZES:
        for protocol in TELE_PROTOCOLS + [Protocol.TAG]:
            for seed in seeds:
                runs.append(PresetRun(
                    f"n{n_infra}_{protocol.value}_seed{seed}",
                    _sweep_config(seed, protocol, n_infra, SWEEP_SESSIONS),
                ))
    return runs


def _sweep_rows(results: dict[str, RunResult], axis_name: str,
                axis_of: Callable[[str], int]) -> dict[str, list[dict]]:
    rows = []
    for label in sorted(results):
        result = results[label]
        rows.append({
            "run": label,
            axis_name: axis_of(label),
            "protocol": result.protocol,
            "seed": result.seed,
            "delivered_total": result.summary["delivered_total"],
            "throughput_per_slot": result.summary["throughput_per_slot"],
            "jain_mean_window": result.summary["jain_mean_window"],
        })
    means: dict[tuple, list[int]] = {}
    for row in rows:
        means.setdefault((row[axis_name], row["protocol"]), []).append(
            row["delivered_total"]
        )
    mean_rows = [
        {
            axis_name: axis,
            "protocol": protocol,
            "seeds": len(values),
            "mean_delivered": sum(values) / len(values),
        }
        for (axis, protocol), values in sorted(means.items())
    ]
    return {"runs": rows, "means": mean_rows}


def _summarize_net_size(results):
    return _sweep_rows(results, "n_infra", lambda label: int(label.split("_")[0][1:]))


def _build_workload(seeds: list[int]) -> list[PresetRun]:
    runs = []
    for n_sessions in WORKLOADS:
        for protocol in TELE_PROTOCOLS + [Protocol.TAG]:
            for seed in seeds:
                runs.append(PresetRun(
                    f"s{n_sessions}_{protocol.value}_seed{seed}",
                    _sweep_config(seed, protocol, SWEEP_INFRA, n_sessions),
                ))
    return runs


def _summarize_workload(results):
    return _sweep_rows(results, "n_sessions", lambda label: int(label.split("_")[0][1:]))


# -- teleportation vs switched tell-and-go tradeoffs ---------------------


def _build_tradeoff_prob(seeds: list[int]) -> list[PresetRun]:
    runs = [
        PresetRun(f"tele_seed{seed}",
                  _sweep_config(seed, Protocol.TELE, SWEEP_INFRA, SWEEP_SESSIONS))
        for seed in seeds
    ]
    for p in PROB_GRID:
        for seed in seeds:
            runs.append(PresetRun(
                f"tag_p{int(round(p * 100)):03d}_seed{seed}",
                _switch_config(seed, p),
            ))
    return runs


def interpolate_crossover(xs: list[float], gaps: list[float]) -> float | None:
    """First x where the gap series crosses zero (linear interpolation)."""
    for (x0, g0), (x1, g1) in zip(zip(xs, gaps), zip(xs[1:], gaps[1:])):
        if g0 == 0:
            return x0
        if g0 < 0 <= g1:
            return x0 + (x1 - x0) * (-g0) / (g1 - g0)
    if gaps and gaps[-1] == 0:
        return xs[-1]
    return None


def _summarize_tradeoff_prob(results):
    tele = [r.summary["delivered_total"] for label, r in results.items()
            if label.startswith("tele_")]
    tele_mean = sum(tele) / len(tele)
    rows = []
    xs, gaps = [], []
    for p in PROB_GRID:
        tag = [
            r.summary["delivered_total"] for label, r in results.items()
            if label.startswith(f"tag_p{int(round(p * 100)):03d}_")
        ]
        tag_mean = sum(tag) / len(tag)
        rows.append({
            "p": p,
            "tag_mean_delivered": tag_mean,
            "tele_mean_delivered": tele_mean,
            "gap": tag_mean - tele_mean,
        })
        xs.append(p)
        gaps.append(tag_mean - tele_mean)
    crossover = interpolate_crossover(xs, gaps)
    return {
        "curve": rows,
        "crossover": [{
            "metric": "equal_throughput_probability",
            "crossover_p": crossover if crossover is not None else float("nan"),
        }],
    }


def _build_tradeoff_slot(seeds: list[int]) -> list[PresetRun]:
    runs = [
        PresetRun(f"tele_seed{seed}",
                  _sweep_config(seed, Protocol.TELE, SWEEP_INFRA, SWEEP_SESSIONS))
        for seed in seeds
    ]
    runs += [
        PresetRun(f"tag_seed{seed}", _switch_config(seed, TRADEOFF_P))
        for seed in seeds
    ]
    return runs


def _summarize_tradeoff_slot(results):
    tele = [r.summary["delivered_total"] for label, r in results.items()
            if label.startswith("tele_")]
    tag = [r.summary["delivered_total"] for label, r in results.items()
           if label.startswith("tag_")]
    tele_mean = sum(tele) / len(tele)
    tag_mean = sum(tag) / len(tag)
    rows = []
    xs, gaps = [], []
    for ratio in RATIO_GRID:
        # Teleportation slots are `ratio` times longer; throughputs are
        # compared per abstract time unit.
        tele_rate = tele_mean / (SWEEP_SLOTS * ratio)
        tag_rate = tag_mean / SWEEP_SLOTS
        rows.append({
            "slot_length_ratio": ratio,
            "tele_per_time": tele_rate,
            "tag_per_time": tag_rate,
            "gap": tag_rate - tele_rate,
        })
        xs.append(ratio)
        gaps.append(tag_rate - tele_rate)
    crossover = interpolate_crossover(xs, gaps)
    return {
        "curve": rows,
        "crossover": [{
            "metric": "equal_throughput_slot_ratio",
            "crossover_ratio": crossover if crossover is not None else float("nan"),
        }],
    }


PRESETS: dict[str, Preset] = {
    "appendix_e": Preset("appendix_e", _build_micro, _summarize_micro),
    "net_size_sweep": Preset("net_size_sweep", _build_net_size,
                             _summarize_net_size),
    "workload_sweep": Preset("workload_sweep", _build_workload,
                             _summarize_workload),
    "tradeoff_prob": Preset("tradeoff_prob", _build_tradeoff_prob,
                            _summarize_tradeoff_prob),
    "tradeoff_slot": Preset("tradeoff_slot", _build_tradeoff_slot,
                            _summarize_tradeoff_slot),
}


def get_preset(name: str) -> Preset:
    if name not in PRESETS:
        raise ConfigError(
            f"unknown preset {name!r}; choose from {sorted(PRESETS)}"
        )
    return PRESETS[name]
