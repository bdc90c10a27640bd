"""Random network topologies with per-node quantum memory capacities.

Infrastructure nodes (repeaters, relays, or all-optical switches depending
on the network kind) are placed uniformly in a square and wired with the
Waxman model; the edge-density parameter is calibrated by bisection until
the realized average infrastructure degree matches a target.  One end host
is attached to every infrastructure node so any node can terminate a
session.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

from .errors import GenerationError
from .rng import TOPOLOGY_STREAM, stream

DEFAULT_CAPACITY = 1000

# Bisection stops early once the realized degree is this close to target,
# leaving headroom for connectivity-repair edges within the +-0.5 contract.
_CALIBRATION_SLACK = 0.25
_DEGREE_TOLERANCE = 0.5
_MAX_BISECTION_STEPS = 64


class NodeKind(Enum):
    REPEATER = "repeater"
    RELAY = "relay"
    SWITCH = "switch"
    HOST = "host"


class NetworkKind(Enum):
    """What the infrastructure nodes are and how their memory is split."""

    TELE = "tele"            # repeaters with transit memory
    TAG_RELAY = "tag_relay"  # trusted relays, hop-by-hop store and forward
    TAG_SWITCH = "tag_switch"  # all-optical switches, no memory


_INFRA_KIND = {
    NetworkKind.TELE: NodeKind.REPEATER,
    NetworkKind.TAG_RELAY: NodeKind.RELAY,
    NetworkKind.TAG_SWITCH: NodeKind.SWITCH,
}


@dataclass(frozen=True)
class Node:
    id: int
    kind: NodeKind
    x: float
    y: float
    capacity: int


@dataclass
class Topology:
    kind: NetworkKind
    nodes: list[Node]
    edges: list[tuple[int, int]]

    def __post_init__(self) -> None:
        self.edges = sorted(tuple(sorted(e)) for e in self.edges)
        self._adjacency: dict[int, list[int]] | None = None

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]

    def adjacency(self) -> dict[int, list[int]]:
        if self._adjacency is None:
            adj: dict[int, list[int]] = {n.id: [] for n in self.nodes}
            for u, v in self.edges:
                adj[u].append(v)
                adj[v].append(u)
            for neighbours in adj.values():
                neighbours.sort()
            self._adjacency = adj
        return self._adjacency

    def hosts(self) -> list[Node]:
        return [n for n in self.nodes if n.kind is NodeKind.HOST]

    def infra(self) -> list[Node]:
        return [n for n in self.nodes if n.kind is not NodeKind.HOST]


@dataclass(frozen=True)
class Diagnostics:
    connected: bool
    degree_histogram: dict[int, int]
    infra_capacity: int
    host_capacity: int
    average_infra_degree: float


def _pairwise_distances(xs: list[float], ys: list[float]) -> list[list[float]]:
    n = len(xs)
    dist = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = math.hypot(xs[i] - xs[j], ys[i] - ys[j])
            dist[i][j] = dist[j][i] = d
    return dist


def _edges_for_beta(beta, draws, dist, d_max, alpha):
    n = len(dist)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if d_max > 0:
                prob = min(1.0, beta * math.exp(-dist[i][j] / (alpha * d_max)))
            else:
                prob = min(1.0, beta)
            if draws[i][j] < prob:
                edges.append((i, j))
    return edges


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self.parent[rb] = ra
        return True


def generate_waxman(
    n_infra: int,
    target_avg_degree: float,
    area_side: float,
    alpha: float,
    seed: int,
    network: NetworkKind = NetworkKind.TELE,
    capacity: int = DEFAULT_CAPACITY,
) -> Topology:
    """Generate a connected topology; pure function of its arguments.

    Edge (u, v) appears with probability ``beta * exp(-d(u,v)/(alpha*d_max))``
    where beta is bisected until the average infrastructure degree lands
    within +-0.5 of ``target_avg_degree``.  Disconnected samples are repaired
    by adding the shortest candidate edges joining components.
    """
    if n_infra < 2:
        raise ValueError(f"need at least 2 infrastructure nodes, got {n_infra}")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must be in (0, 1], got {alpha}")
    if target_avg_degree <= 0 or area_side <= 0:
        raise ValueError("target_avg_degree and area_side must be positive")

    rng = stream(seed, TOPOLOGY_STREAM)
    xs = (rng.random(n_infra) * area_side).tolist()
    ys = (rng.random(n_infra) * area_side).tolist()
    draws = rng.random((n_infra, n_infra)).tolist()

    dist = _pairwise_distances(xs, ys)
    d_max = max(max(row) for row in dist)

    # Realized degree is a monotone step function of beta; bisect on it.
    beta_hi = math.exp(1.0 / alpha)

    def avg_degree(edges: list[tuple[int, int]]) -> float:
        return 2.0 * len(edges) / n_infra

    best_edges = _edges_for_beta(beta_hi, draws, dist, d_max, alpha)
    best_gap = abs(avg_degree(best_edges) - target_avg_degree)
    if avg_degree(best_edges) < target_avg_degree - _DEGREE_TOLERANCE:
        raise GenerationError(
            f"cannot reach degree {target_avg_degree} with {n_infra} nodes"
        )
    lo, hi = 0.0, beta_hi
    for _ in range(_MAX_BISECTION_STEPS):
        if best_gap <= _CALIBRATION_SLACK:
            break
        mid = (lo + hi) / 2.0
        edges = _edges_for_beta(mid, draws, dist, d_max, alpha)
        gap = abs(avg_degree(edges) - target_avg_degree)
        if gap < best_gap:
            best_edges, best_gap = edges, gap
        if avg_degree(edges) < target_avg_degree:
            lo = mid
        else:
            hi = mid
    if best_gap > _DEGREE_TOLERANCE:
        raise GenerationError(
            f"degree calibration failed: best average "
            f"{target_avg_degree + best_gap:.2f} vs target {target_avg_degree}"
        )

    # Repair connectivity with the shortest edges joining distinct components.
    uf = _UnionFind(n_infra)
    edge_set = set(best_edges)
    for u, v in best_edges:
        uf.union(u, v)
    components = len({uf.find(i) for i in range(n_infra)})
    if components > 1:
        candidates = sorted(
            ((dist[i][j], i, j) for i in range(n_infra) for j in range(i + 1, n_infra)
             if (i, j) not in edge_set),
            key=lambda t: t,
        )
        for _, i, j in candidates:
            if components == 1:
                break
            if uf.union(i, j):
                edge_set.add((i, j))
                components -= 1
    edges = sorted(edge_set)

    if abs(avg_degree(edges) - target_avg_degree) > _DEGREE_TOLERANCE:
        raise GenerationError("connectivity repair pushed degree out of range")

    infra_kind = _INFRA_KIND[network]
    infra_capacity = 0 if infra_kind is NodeKind.SWITCH else capacity
    nodes = [
        Node(i, infra_kind, xs[i], ys[i], infra_capacity) for i in range(n_infra)
    ]
    # One host per infrastructure node, co-located, with the full capacity.
    all_edges = list(edges)
    for i in range(n_infra):
        host_id = n_infra + i
        nodes.append(Node(host_id, NodeKind.HOST, xs[i], ys[i], capacity))
        all_edges.append((i, host_id))

    return Topology(kind=network, nodes=nodes, edges=all_edges)


def validate(topology: Topology) -> Diagnostics:
    """Read-only diagnostics: connectivity, infra degree histogram, capacity."""
    adj = topology.adjacency()
    nodes = topology.nodes
    if nodes:
        seen = {nodes[0].id}
        frontier = [nodes[0].id]
        while frontier:
            current = frontier.pop()
            for neighbour in adj[current]:
                if neighbour not in seen:
                    seen.add(neighbour)
                    frontier.append(neighbour)
        connected = len(seen) == len(nodes)
    else:
        connected = True

    infra_ids = {n.id for n in topology.infra()}
    histogram: dict[int, int] = {}
    total = 0
    for node_id in sorted(infra_ids):
        degree = sum(1 for m in adj[node_id] if m in infra_ids)
        histogram[degree] = histogram.get(degree, 0) + 1
        total += degree
    average = total / len(infra_ids) if infra_ids else 0.0

    return Diagnostics(
        connected=connected,
        degree_histogram=histogram,
        infra_capacity=sum(n.capacity for n in topology.infra()),
        host_capacity=sum(n.capacity for n in topology.hosts()),
        average_infra_degree=average,
    )


def to_document(topology: Topology) -> dict:
    """JSON-serializable form pinning an exact graph."""
    return {
        "kind": topology.kind.value,
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind.value,
                "x": n.x,
                "y": n.y,
                "capacity": n.capacity,
            }
            for n in topology.nodes
        ],
        "edges": [list(e) for e in topology.edges],
    }


def from_document(doc: dict) -> Topology:
    nodes = [
        Node(d["id"], NodeKind(d["kind"]), float(d["x"]), float(d["y"]),
             int(d["capacity"]))
        for d in doc["nodes"]
    ]
    nodes.sort(key=lambda n: n.id)
    if [n.id for n in nodes] != list(range(len(nodes))):
        raise ValueError("node ids must be dense from 0")
    edges = [tuple(e) for e in doc["edges"]]
    ids = {n.id for n in nodes}
    for u, v in edges:
        if u == v:
            raise ValueError(f"self-loop on node {u}")
        if u not in ids or v not in ids:
            raise ValueError(f"edge ({u}, {v}) references unknown node")
    if len({tuple(sorted(e)) for e in edges}) != len(edges):
        raise ValueError("duplicate edges")
    for node in nodes:
        if node.kind is NodeKind.SWITCH and node.capacity != 0:
            raise ValueError(f"switch {node.id} must have zero capacity")
    topology = Topology(NetworkKind(doc["kind"]), nodes, edges)
    adj = topology.adjacency()
    for node in topology.hosts():
        if len(adj[node.id]) != 1:
            raise ValueError(f"host {node.id} must have degree exactly 1")
    return topology


def dumps(topology: Topology) -> str:
    return json.dumps(to_document(topology), sort_keys=True)


def loads(text: str) -> Topology:
    return from_document(json.loads(text))
