"""Teleportation transport: window control and per-slot reservation.

Each session announces a sending window, every node on the path checks the
announced demand against its pool, and the window is halved exactly once
if any node reports congestion.  Windows then grow again: doubling in slow
start, plus one in congestion avoidance.  Two variants are provided: an
explicit per-node fair share (EW) and a fair-share threshold check that
keeps the halving dynamics (FRA).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .memory import (
    Demand,
    Grant,
    RECEIVE_COST,
    TELE_SEND_COST,
    assign_memory,
)
from .routing import Path


class Phase(Enum):
    SLOW_START = "SS"
    AVOIDANCE = "CA"


def next_window(window: int, phase: Phase, congested: bool) -> tuple[int, int, Phase]:
    """One window-control step: returns (granted, next window, next phase).

    A congestion signal halves the window before transfer and moves the
    session to avoidance; afterwards the window doubles in slow start or
    grows by one in avoidance, and never falls below 1.
    """
    if congested:
        granted = window // 2
        phase = Phase.AVOIDANCE
    else:
        granted = window
    if phase is Phase.SLOW_START:
        upcoming = 2 * granted
    else:
        upcoming = granted + 1
    return granted, max(1, upcoming), phase


@dataclass
class TeleSession:
    """One end-to-end flow with its sending-window state."""

    id: int
    path: Path
    remaining: int | None  # None means an unbounded stream
    window: int = 1
    phase: Phase = Phase.SLOW_START
    granted: int = 0
    delivered_total: int = 0
    start_slot: int = 0

    @property
    def src(self) -> int:
        return self.path.src

    @property
    def dst(self) -> int:
        return self.path.dst

    @property
    def finished(self) -> bool:
        return self.remaining == 0

    def announce(self) -> int:
        return self.window

    def advance_window(self, congested: bool) -> None:
        """Move window state to the next slot's announcement."""
        _, self.window, self.phase = next_window(self.window, self.phase, congested)

    def transfer(self, granted: int) -> int:
        """Teleport up to the granted window; returns qubits delivered."""
        if self.remaining is None:
            delivered = granted
        else:
            delivered = min(granted, self.remaining)
            self.remaining -= delivered
        self.delivered_total += delivered
        return delivered


PoolMap = dict  # (node id, pool kind) -> MemoryPool


def demand_points(path: Path) -> list[tuple[tuple[int, str], Fraction]]:
    """Pools a session draws from, with per-window unit costs.

    The source reserves in its send pool and the destination in its receive
    pool; every intermediate node reserves transit memory for both the
    upstream and downstream entanglement links.
    """
    points: list[tuple[tuple[int, str], Fraction]] = [
        ((path.src, "send"), TELE_SEND_COST)
    ]
    for node in path.nodes[1:-1]:
        points.append(((node, "transit"), TELE_SEND_COST))
    points.append(((path.dst, "receive"), RECEIVE_COST))
    return points


def reserve_teleport(sessions: list[TeleSession], pools: PoolMap) -> dict[int, Grant]:
    """Two-pass reservation for one slot.

    Pass 1: every pool independently runs the halving assignment over the
    announced windows of the sessions crossing it, collecting congestion
    marks.  Pass 2: a session is halved iff any of its pools marked it, and
    the final (possibly halved) reservation is placed at every pool on its
    path.  A session is never halved more than once per slot.
    """
    per_pool: dict[tuple[int, str], list[Demand]] = {}
    costs: dict[int, list[tuple[tuple[int, str], Fraction]]] = {}
    for session in sessions:
        points = demand_points(session.path)
        costs[session.id] = points
        window = session.announce()
        for key, unit_cost in points:
            per_pool.setdefault(key, []).append(
                Demand(session.id, window, unit_cost)
            )

    marked: set[int] = set()
    for key in sorted(per_pool):
        grants = assign_memory(per_pool[key], pools[key].capacity)
        marked.update(sid for sid, grant in grants.items() if grant.congested)

    outcomes: dict[int, Grant] = {}
    for session in sessions:
        congested = session.id in marked
        window = session.announce()
        granted = window // 2 if congested else window
        outcomes[session.id] = Grant(granted, congested)
        for key, unit_cost in costs[session.id]:
            pools[key].reserve(session.id, math.ceil(unit_cost * granted))
    return outcomes


def node_window_capacity(node: int, pools: PoolMap) -> int | None:
    """Largest window a node can support for one session, by its role.

    A repeater backs a window with 2 transit units per circuit; an end
    host must be able to play either role, so it is limited by the
    smaller of its send (2 units each) and receive (1 unit each) pools.
    Returns None for nodes without memory pools (all-optical switches).
    """
    if (node, "transit") in pools:
        return pools[(node, "transit")].capacity // 2
    if (node, "send") in pools:
        return min(
            pools[(node, "send")].capacity // 2,
            pools[(node, "receive")].capacity,
        )
    return None


def _fair_shares(sessions: list[TeleSession], pools: PoolMap) -> dict[int, int]:
    """Per-session floor(C/N) minimum over path nodes, N counted per node."""
    traversals: dict[int, int] = {}
    for session in sessions:
        for node in session.path.nodes:
            traversals[node] = traversals.get(node, 0) + 1
    shares: dict[int, int] = {}
    for session in sessions:
        node_shares = [
            capacity // traversals[node]
            for node in session.path.nodes
            if (capacity := node_window_capacity(node, pools)) is not None
        ]
        shares[session.id] = min(node_shares)
    return shares


def reserve_explicit(sessions: list[TeleSession], pools: PoolMap) -> dict[int, Grant]:
    """Explicit-window variant: every node splits evenly among its sessions.

    No window is announced; each node grants floor(C/N) window units to
    each of its N traversing sessions and a session uses the smallest
    grant along its path.
    """
    shares = _fair_shares(sessions, pools)
    outcomes: dict[int, Grant] = {}
    for session in sessions:
        share = shares[session.id]
        outcomes[session.id] = Grant(share, False)
        for key, unit_cost in demand_points(session.path):
            pools[key].reserve(session.id, math.ceil(unit_cost * share))
    return outcomes


def reserve_fair(sessions: list[TeleSession], pools: PoolMap) -> dict[int, Grant]:
    """Fair-share threshold variant: halve whenever a request exceeds C/N."""
    shares = _fair_shares(sessions, pools)
    outcomes: dict[int, Grant] = {}
    for session in sessions:
        window = session.announce()
        congested = window > shares[session.id]
        granted = window // 2 if congested else window
        outcomes[session.id] = Grant(granted, congested)
        for key, unit_cost in demand_points(session.path):
            pools[key].reserve(session.id, math.ceil(unit_cost * granted))
    return outcomes


def release_surplus(
    session: TeleSession, granted: int, delivered: int, pools: PoolMap
) -> None:
    """Return unused reservation when a session delivers less than granted."""
    if delivered >= granted:
        return
    for key, unit_cost in demand_points(session.path):
        pools[key].require(session.id, math.ceil(unit_cost * delivered))
