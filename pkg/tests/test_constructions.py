from __future__ import annotations

import itertools
import json
import random
from fractions import Fraction as Q

import networkx as nx
import pytest

from packlab import constructions as cons
from packlab.cover_model import UNMATCHED, cover_from_json
from packlab.fractional_lp import enumerate_transversals, verify_fractional_clique
from packlab.graph_core import Graph, catalog, complete, cycle, load_graph, parse_graph_name, path
from packlab.packing_search import count_transversals, find_packing


def nx_girth(g: Graph) -> float:
    basis = nx.minimum_cycle_basis(g.to_networkx())
    return min((len(c) for c in basis), default=float("inf"))


@pytest.mark.parametrize("g", [5, 6, 7])
def test_girth_construction_structure(g):
    inst = cons.girth_construction(g)
    n = inst.extra["n"]
    assert n % 2 == 1 and n >= g
    # three n-cycles plus 3(n-2) + 3 connecting paths of g - 1 inner vertices
    assert inst.graph.n == 3 * n + (3 * (n - 2) + 3) * (g - 1)
    h = inst.graph.to_networkx()
    assert nx.check_planarity(h)[0]
    assert nx_girth(inst.graph) >= g
    assert cons.same_list_classes_connected(inst.graph, inst.extra["lists"])
    assert set(map(tuple, inst.extra["lists"])) == {cons.LIST_X, cons.LIST_Y, cons.LIST_Z}


def test_girth_construction_has_no_3_packing():
    inst = cons.girth_construction(5)
    res = inst.verify()
    assert all(ok for _, _, ok in res.values()), res
    assert find_packing(inst.cover) is None


def test_girth_construction_rejects_small_g():
    with pytest.raises(ValueError):
        cons.girth_construction(2)


def test_same_list_classes_connected_negative():
    g = cycle(4)
    assert not cons.same_list_classes_connected(g, [(1, 2), (3, 4), (1, 2), (3, 4)])
    assert cons.same_list_classes_connected(g, [(1, 2), (1, 2), (3, 4), (3, 4)])


def test_k5_minus_claims_fast():
    inst = cons.k5_minus_bad_cover(samples=50)
    res = inst.verify(skip=["unique_bad_class"])
    assert all(ok for _, _, ok in res.values()), res
    assert count_transversals(inst.cover) == len(enumerate_transversals(inst.cover)) == 54


def test_k5_minus_unique_bad_class():
    with_aut, without_aut, failures, contains = cons.k5_minus_bad_classes(cons.k5_minus_bad_cover_raw())
    assert (with_aut, without_aut, failures, contains) == (1, 1, 1, True)


def test_outerplanar_checks():
    assert not cons.is_outerplanar(complete(4))
    assert not cons.is_outerplanar(parse_graph_name("K2,3"))
    assert cons.is_outerplanar(catalog("F", 7))
    assert cons.is_outerplanar(cycle(8))


def test_outerplanar_2tree_instance():
    inst = cons.outerplanar_2tree_cover()
    g = inst.graph
    assert g.m == 2 * g.n - 3 and cons.is_outerplanar(g)
    assert len(enumerate_transversals(inst.extra["drawn"])) == 0
    ok, total = verify_fractional_clique(inst.cover, inst.extra["weights"])
    assert ok and total == Q(22, 7)
    res = inst.verify()
    assert all(ok for _, _, ok in res.values()), res


def test_nonextendable_instance():
    res = cons.nonextendable_fractional_example().verify()
    assert all(ok for _, _, ok in res.values()), res


def test_k23_plus_edge_instance():
    inst = cons.k23_plus_edge()
    res = inst.verify()
    assert all(ok for _, _, ok in res.values()), res
    assert inst.cover is not None and inst.cover.is_full()


def _subtrees_oracle(g: Graph):
    h = g.to_networkx()
    out = []
    for r in range(1, g.n + 1):
        for vs in itertools.combinations(range(g.n), r):
            sub = h.subgraph(vs)
            if nx.is_tree(sub) and all(sum(1 for w in h[v] if w not in vs) == 1 for v in vs):
                out.append(vs)
    return out


def test_induced_subtrees_one_outside_matches_oracle():
    assert cons.induced_subtrees_one_outside(cycle(4)) == [(0, 1), (0, 3), (1, 2), (2, 3)]
    rng = random.Random(0)
    for _ in range(30):
        n = rng.randint(3, 7)
        es = [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.45]
        g = Graph(n, es)
        assert cons.induced_subtrees_one_outside(g) == _subtrees_oracle(g)


def test_write_round_trip(tmp_path):
    inst = cons.outerplanar_2tree_cover()
    res = inst.verify()
    paths = inst.write(str(tmp_path), res)
    graph_path, cover_path, claims_path = paths
    assert load_graph(graph_path) == inst.graph
    assert cover_from_json(open(cover_path).read()) == inst.cover
    doc = json.load(open(claims_path))
    assert all(c["ok"] for c in doc["claims"])
    assert {c["name"] for c in doc["claims"]} == {c.name for c in inst.claims}


def test_cover_from_labelled_edges():
    g = cycle(3)
    lists = {0: (1, 2), 1: (3, 4), 2: (5, 6)}
    c = cons.cover_from_labelled_edges(g, lists, [(1, 3), (4, 2), (6, 3), (5, 1)])
    assert c.map(0, 1) == (0, 1)
    assert c.map(1, 2) == (1, UNMATCHED)
    assert c.map(0, 2) == (0, UNMATCHED)
    assert list(c.labels) == [(1, 2), (3, 4), (5, 6)]
    with pytest.raises(ValueError):
        cons.cover_from_labelled_edges(path(3), lists, [(1, 5)])


def test_registry_names():
    assert set(cons.CONSTRUCTIONS) == {"girth", "k5-minus", "outerplanar", "nonextendable", "k23-plus-edge"}
