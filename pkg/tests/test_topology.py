"""Waxman generation, validation, and serialization."""

import pytest

from qdnsim.topology import (
    NetworkKind,
    Node,
    NodeKind,
    Topology,
    dumps,
    generate_waxman,
    loads,
    validate,
)


def bfs_connected(topology):
    # Independent connectivity check (not reusing validate's traversal).
    adj = {n.id: set() for n in topology.nodes}
    for u, v in topology.edges:
        adj[u].add(v)
        adj[v].add(u)
    start = topology.nodes[0].id
    seen, stack = {start}, [start]
    while stack:
        for nxt in adj[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(topology.nodes)


def infra_avg_degree(topology):
    infra = {n.id for n in topology.infra()}
    count = sum(1 for u, v in topology.edges if u in infra and v in infra)
    return 2 * count / len(infra)


def path_topology(n):
    nodes = [Node(i, NodeKind.REPEATER, float(i), 0.0, 100) for i in range(n)]
    edges = [(i, i + 1) for i in range(n - 1)]
    return Topology(NetworkKind.TELE, nodes, edges)


class TestGenerateWaxman:
    def test_reference_size_and_degree(self):
        topology = generate_waxman(50, 4.0, 100.0, 0.4, seed=7)
        assert len(topology.nodes) == 100  # 50 infra + 50 hosts
        assert len(topology.hosts()) == 50
        assert 3.5 <= infra_avg_degree(topology) <= 4.5
        assert bfs_connected(topology)

    def test_two_nodes_forced_edge(self):
        topology = generate_waxman(2, 1.0, 1.0, 1.0, seed=0)
        infra = {n.id for n in topology.infra()}
        infra_edges = [e for e in topology.edges if set(e) <= infra]
        assert infra_edges == [(0, 1)]

    def test_same_seed_same_edges(self):
        a = generate_waxman(30, 4.0, 100.0, 0.4, seed=11)
        b = generate_waxman(30, 4.0, 100.0, 0.4, seed=11)
        assert a.edges == b.edges
        assert [n.kind for n in a.nodes] == [n.kind for n in b.nodes]

    def test_different_seeds_differ(self):
        a = generate_waxman(30, 4.0, 100.0, 0.4, seed=1)
        b = generate_waxman(30, 4.0, 100.0, 0.4, seed=2)
        assert a.edges != b.edges

    def test_hundred_seeds_connected_and_calibrated(self):
        for seed in range(100):
            topology = generate_waxman(12, 3.0, 50.0, 0.4, seed=seed)
            assert bfs_connected(topology)
            assert abs(infra_avg_degree(topology) - 3.0) <= 0.5
            assert validate(topology).connected

    def test_switch_network_has_no_infra_memory(self):
        topology = generate_waxman(5, 2.0, 10.0, 0.4, seed=3,
                                   network=NetworkKind.TAG_SWITCH)
        assert all(n.capacity == 0 for n in topology.infra())
        assert all(n.capacity == 1000 for n in topology.hosts())

    def test_too_few_nodes_rejected(self):
        with pytest.raises(ValueError):
            generate_waxman(1, 4.0, 100.0, 0.4, seed=0)

    def test_hosts_have_degree_one(self):
        topology = generate_waxman(20, 4.0, 100.0, 0.4, seed=5)
        adj = topology.adjacency()
        for host in topology.hosts():
            assert len(adj[host.id]) == 1


class TestValidate:
    def test_path_graph_histogram(self):
        diag = validate(path_topology(3))
        assert diag.connected
        assert diag.degree_histogram == {1: 2, 2: 1}

    def test_disjoint_edges_not_connected(self):
        nodes = [Node(i, NodeKind.REPEATER, float(i), 0.0, 10) for i in range(4)]
        topology = Topology(NetworkKind.TELE, nodes, [(0, 1), (2, 3)])
        assert not validate(topology).connected

    def test_capacity_totals(self):
        diag = validate(path_topology(3))
        assert diag.infra_capacity == 300
        assert diag.host_capacity == 0


class TestSerialization:
    def test_round_trip(self):
        topology = generate_waxman(10, 3.0, 20.0, 0.4, seed=9)
        again = loads(dumps(topology))
        assert again.edges == topology.edges
        assert again.nodes == topology.nodes
        assert dumps(again) == dumps(topology)

    def test_rejects_duplicate_edges(self):
        doc = {
            "kind": "tele",
            "nodes": [
                {"id": 0, "kind": "repeater", "x": 0, "y": 0, "capacity": 1},
                {"id": 1, "kind": "repeater", "x": 1, "y": 0, "capacity": 1},
            ],
            "edges": [[0, 1], [1, 0]],
        }
        with pytest.raises(ValueError):
            loads(__import__("json").dumps(doc))

    def test_rejects_host_with_extra_links(self):
        doc = {
            "kind": "tele",
            "nodes": [
                {"id": 0, "kind": "repeater", "x": 0, "y": 0, "capacity": 1},
                {"id": 1, "kind": "repeater", "x": 1, "y": 0, "capacity": 1},
                {"id": 2, "kind": "host", "x": 0, "y": 0, "capacity": 1},
            ],
            "edges": [[0, 1], [0, 2], [1, 2]],
        }
        with pytest.raises(ValueError):
            loads(__import__("json").dumps(doc))
