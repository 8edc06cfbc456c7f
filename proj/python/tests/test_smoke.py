import json
import random

import networkx as nx
import pytest

import clusterml


def random_connected_graph(rng, n):
    g = nx.Graph()
    g.add_nodes_from(range(n))
    for v in range(1, n):
        g.add_edge(rng.randrange(v), v)
    for _ in range(rng.randrange(n, 3 * n)):
        a, b = rng.sample(range(n), 2)
        g.add_edge(a, b)
    return g


def edge_list(g):
    return [tuple(sorted(e)) for e in g.edges()]


def test_a2_closure():
    g = clusterml.generate("A2")
    assert g.vertex_count == 10
    assert g.closed
    assert clusterml.generate("A2", payload="quivers").vertex_count == 2
    clusters = {frozenset(g.seed(v).cluster) for v in range(g.vertex_count)}
    assert len(clusters) == 5


def test_seed_round_trip():
    s = clusterml.builtin_seed("D4").mutate(1).mutate(3)
    assert clusterml.seed_from_json(s.to_json()) == s
    assert s.mutate(2).mutate(2) == s
    assert s.rank == 4
    custom = clusterml.Seed([[0, 1], [-1, 0]])
    assert custom == clusterml.builtin_seed("A2")


def test_counts_by_depth():
    g = clusterml.generate("A4", depth=4)
    assert g.counts_by_depth() == [1, 5, 14, 32, 72]
    back = clusterml.graph_from_json(g.to_json())
    assert back.edges == g.edges
    assert json.loads(g.to_json())["vertex_count"] == 72


def test_unknown_seed():
    with pytest.raises(ValueError):
        clusterml.builtin_seed("Q9")


@pytest.mark.parametrize("seed", range(20))
def test_statistics_match_networkx(seed):
    rng = random.Random(seed)
    g = random_connected_graph(rng, rng.randrange(4, 25))
    n, edges = g.number_of_nodes(), edge_list(g)
    stats = clusterml.graph_stats(n, edges)
    assert stats["density"] == pytest.approx(nx.density(g))
    assert stats["triangle_clustering"] == pytest.approx(nx.average_clustering(g))
    square = nx.square_clustering(g)
    assert clusterml.square_clustering(n, edges) == pytest.approx([square[v] for v in range(n)])
    assert stats["wiener"] == nx.wiener_index(g)
    lengths = sorted(len(c) for c in nx.minimum_cycle_basis(g))
    assert sorted(clusterml.cycle_basis_lengths(n, edges)) == lengths


@pytest.mark.parametrize("seed", range(10))
def test_centrality_matches_networkx(seed):
    rng = random.Random(100 + seed)
    g = random_connected_graph(rng, rng.randrange(5, 30))
    ours = clusterml.eigenvector_centrality(g.number_of_nodes(), edge_list(g))
    theirs = nx.eigenvector_centrality_numpy(g)
    assert ours == pytest.approx([abs(theirs[v]) for v in range(len(ours))], abs=1e-6)


def test_seed_graph_statistics_match_networkx():
    g = clusterml.generate("F4", depth=4)
    h = nx.Graph()
    h.add_nodes_from(range(g.vertex_count))
    h.add_edges_from((a, b) for a, b, _ in g.edges)
    stats = g.stats()
    assert stats["vertices"] == 65
    assert stats["wiener"] == nx.wiener_index(h)
    assert stats["square_clustering"] == pytest.approx(sum(nx.square_clustering(h).values()) / 65)
    assert stats["mcb"] == {4: 17, 6: 3}


def test_cluster_counts_and_ratios():
    assert [clusterml.cluster_count(f"A{n}") for n in range(1, 6)] == [2, 5, 14, 42, 132]
    assert clusterml.cluster_count("F4") == 105
    profile = clusterml.embedding_profile("B3")
    assert profile["ratio"] == "4"
    assert profile["p"] == {4: 6}


def test_metrics():
    y = [0, 1, 1, 0, 2, 2]
    p = [0, 1, 0, 0, 2, 1]
    assert clusterml.accuracy(p, y) == pytest.approx(4 / 6)
    assert clusterml.mcc(y, y) == pytest.approx(1.0)


def test_reproduce_permutation_table():
    passed, rows = clusterml.reproduce(3)
    assert passed
    assert any(r["field"] == "orbit permutations" for r in rows)
