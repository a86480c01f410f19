from __future__ import annotations

import itertools
import random
from fractions import Fraction

import networkx as nx
import pytest
from networkx.algorithms.approximation import treewidth_min_degree

from packlab.graph_core import (INF, Graph, GraphError, catalog, check_kuratowski_witness, degeneracy, girth,
                                is_planar, load_graph, mad, parse_graph_name, read_graph, structure, write_graph)


def girth_oracle(g: Graph) -> float:
    """Shortest cycle through each edge: 1 + dist(u, v) once uv is removed."""
    best = INF
    h = g.to_networkx()
    for u, v in g.edges:
        h.remove_edge(u, v)
        try:
            best = min(best, nx.shortest_path_length(h, u, v) + 1)
        except nx.NetworkXNoPath:
            pass
        h.add_edge(u, v)
    return best


def mad_oracle(g: Graph) -> Fraction:
    best = Fraction(0)
    for r in range(1, g.n + 1):
        for s in itertools.combinations(range(g.n), r):
            ss = set(s)
            e = sum(1 for u, v in g.edges if u in ss and v in ss)
            best = max(best, Fraction(2 * e, r))
    return best


CATALOG_SMALL = ["K5", "K5-", "K3,3", "C6", "C7", "P5", "W6", "F6", "A", "A+", "B", "B+", "C", "C+", "D",
                 "G(6,2,3)", "G+(6,2,3)", "G+(7,3,3)", "K23_plus_edge", "square_of_path(7)"]


def test_graph_rejects_bad_edges():
    with pytest.raises(GraphError):
        Graph(3, [(0, 0)])
    with pytest.raises(GraphError):
        Graph(3, [(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        Graph(3, [(0, 3)])


def test_adjacency_symmetric():
    g = catalog("A+")
    for u in range(g.n):
        for v in g.adj[u]:
            assert u in g.adj[v]


def test_girth_examples():
    assert girth(catalog("K", 5)) == 3
    assert girth(catalog("C", 7)) == 7
    assert girth(catalog("P", 6)) == INF


@pytest.mark.parametrize("name", CATALOG_SMALL)
def test_catalog_girth_and_mad_match_oracles(name):
    g = parse_graph_name(name)
    assert girth(g) == girth_oracle(g)
    m = mad(g)
    assert m.value == mad_oracle(g)
    sub, _ = g.induced(m.witness)
    assert Fraction(2 * sub.m, sub.n) == m.value
    assert m.value >= Fraction(2 * g.m, g.n)


@pytest.mark.parametrize("name", CATALOG_SMALL)
def test_degeneracy_bounds(name):
    g = parse_graph_name(name)
    d, order = degeneracy(g)
    assert sorted(order) == list(range(g.n))
    pos = {v: i for i, v in enumerate(order)}
    assert all(sum(1 for u in g.adj[v] if pos[u] > pos[v]) <= d for v in range(g.n))
    assert d <= max(len(a) for a in g.adj)
    m = mad(g).value
    assert m / 2 <= d <= m


def test_degeneracy_examples():
    assert degeneracy(catalog("P", 5))[0] == 1
    assert degeneracy(catalog("K", 5))[0] == 4


@pytest.mark.parametrize("name", ["C5", "C8", "P6", "F6", "F8", "K2,5", "square_of_path(8)"])
def test_series_parallel_catalog_degeneracy(name):
    g = parse_graph_name(name)
    assert treewidth_min_degree(g.to_networkx())[0] <= 2
    assert degeneracy(g)[0] <= 2


def test_mad_examples():
    assert mad(catalog("K", 5)).value == 4
    assert mad(catalog("C", 6)).value == 2
    assert mad(catalog("K23_plus_edge")).value == Fraction(14, 5)
    with pytest.raises(GraphError):
        mad(Graph(0))


def test_planarity():
    for name in ("K5", "K3,3"):
        g = parse_graph_name(name)
        res = is_planar(g)
        assert not res.planar
        assert check_kuratowski_witness(g, res)
    res = is_planar(catalog("W", 7))
    assert res.planar and res.rotation is not None


@pytest.mark.parametrize("name", CATALOG_SMALL)
def test_planar_euler_bound(name):
    g = parse_graph_name(name)
    gi = girth(g)
    if is_planar(g) and gi != INF and g.n >= 3:
        assert g.m * (gi - 2) <= gi * (g.n - 2)


def test_catalog_examples():
    k = catalog("K_minus", 5)
    assert (k.n, k.m) == (5, 9)
    ap = catalog("A+")
    assert (ap.n, ap.m) == (6, 11)
    g = catalog("G+", 7, 3, 3)
    # v1..v7 are 0..6
    want = {(i, i + 1) for i in range(6)} | {(0, 3), (0, 4), (0, 5), (1, 6), (2, 6), (3, 6), (0, 6)}
    assert set(g.edges) == want


def test_catalog_a_plus_is_k33_plus_two_disjoint_edges():
    g = catalog("A+")
    k33 = nx.complete_bipartite_graph(3, 3)
    h = g.to_networkx()
    extra = [e for e in h.edges if not k33.has_edge(*e)]
    assert len(extra) == 2 and not set(extra[0]) & set(extra[1])


def test_catalog_errors():
    with pytest.raises(GraphError):
        catalog("nope")
    with pytest.raises(GraphError):
        catalog("G", 7, 1, 5)
    with pytest.raises(GraphError):
        catalog("G", 9, 2, 3)


def test_graph_file_round_trip(tmp_path):
    g = catalog("B+")
    assert read_graph(write_graph(g)) == g
    p = tmp_path / "b.graph"
    p.write_text(write_graph(g))
    assert load_graph(str(p)) == g
    assert load_graph("B+") == g


def test_random_graphs_match_oracles():
    rng = random.Random(3)
    for _ in range(40):
        n = rng.randint(3, 8)
        es = [e for e in itertools.combinations(range(n), 2) if rng.random() < 0.4]
        g = Graph(n, es)
        assert girth(g) == girth_oracle(g)
        if g.m:
            assert mad(g).value == mad_oracle(g)
        rep = structure(g)
        assert rep.planar.planar == nx.check_planarity(g.to_networkx())[0]
