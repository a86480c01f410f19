from __future__ import annotations

import itertools
import random

import pytest

from packlab.constructions import k5_minus_bad_cover_raw
from packlab.cover_model import (UNMATCHED, BudgetExceeded, Cover, CoverError, FullCoverSpace, all_choices,
                                 check_partial_packing, compatible, compatible_via_derangement, cover_from_json,
                                 cover_to_json, enumerate_full_covers, full_cover, full_identity_cover,
                                 is_transversal, list_cover, restrict, untwist)
from packlab.graph_core import Graph, GraphError, catalog, complete_minus, cycle, path
from packlab.packing_search import random_cover, random_full_cover
from packlab.perms import all_perms, class_representatives


def brute_count(c: Cover) -> int:
    return sum(1 for ch in itertools.product(*(range(s) for s in c.sizes)) if is_transversal(c, ch))


def test_cover_rejects_non_injective():
    g = path(2)
    with pytest.raises(CoverError):
        Cover(g, [2, 2], {(0, 1): (0, 0)})
    with pytest.raises(CoverError):
        Cover(g, [2, 2], {(0, 1): (0, 2)})
    with pytest.raises(CoverError):
        Cover(g, [0, 2])


def test_reverse_orientation_is_inverse():
    g = path(2)
    c = Cover(g, [3, 3], {(1, 0): (2, UNMATCHED, 0)})
    fwd = c.map(0, 1)
    back = c.map(1, 0)
    for i, j in enumerate(fwd):
        if j != UNMATCHED:
            assert back[j] == i
    assert sorted(c.pairs(1, 0)) == [(0, 2), (2, 0)]


def test_list_cover_examples():
    c = list_cover(cycle(3), [{1, 2, 3}] * 3)
    assert c.is_full() and c.without_labels() == full_identity_cover(cycle(3), 3)
    sq = list_cover(catalog("square_of_path", 6), [{1, 2, 3}] * 6)
    assert brute_count(sq) == 6
    with pytest.raises(CoverError):
        list_cover(path(2), [{1}, set()])


def test_full_identity_examples():
    assert brute_count(full_identity_cover(path(2), 2)) == 2
    assert brute_count(full_identity_cover(cycle(5), 3)) == 30
    rng = random.Random(0)
    for n in range(2, 6):
        t = Graph(n, [(i, rng.randrange(i)) for i in range(1, n)])
        for k in (2, 3):
            assert brute_count(full_identity_cover(t, k)) == k * (k - 1) ** (n - 1)


def test_untwist_examples():
    g = cycle(3)
    c = full_cover(g, 3, {(0, 2): (1, 0, 2)})
    forest = [(0, 1), (1, 2)]
    d, rel = untwist(c, forest)
    assert d == c and rel == [(0, 1, 2)] * 3
    rng = random.Random(1)
    p4 = path(4)
    for _ in range(20):
        c = random_full_cover(p4, 4, rng)
        d, _ = untwist(c, p4.edges)
        assert d == full_identity_cover(p4, 4)
        assert brute_count(d) == brute_count(c)


def test_untwist_errors():
    g = cycle(3)
    with pytest.raises(GraphError):
        untwist(full_identity_cover(g, 2), g.edges)
    c = Cover(path(2), [2, 2], {(0, 1): (0, UNMATCHED)})
    with pytest.raises(CoverError):
        untwist(c, [(0, 1)])


def test_restrict_examples():
    c = full_identity_cover(cycle(4), 3)
    assert restrict(c, c.graph) == c
    assert restrict(c, path(3)) == full_identity_cover(path(3), 3)
    with pytest.raises(GraphError):
        restrict(full_identity_cover(path(3), 2), Graph(3, [(0, 2)]))


def test_k5_minus_identity_edges_form_a_triangle():
    c = k5_minus_bad_cover_raw()
    ident = [e for e in c.graph.edges if c.map(*e) == (0, 1, 2, 3)]
    assert sorted(ident) == [(0, 3), (1, 3), (1, 4), (2, 4), (3, 4)]
    sub = Graph(3, [(0, 1), (0, 2), (1, 2)])
    assert restrict(c, sub, [1, 3, 4]) == full_identity_cover(sub, 4)


def test_enumerate_full_covers_examples():
    covers = list(enumerate_full_covers(cycle(3), 4, [(0, 1), (1, 2)]))
    assert len(covers) == 5
    assert {c.edge_perm(0, 2) for c in covers} == set(class_representatives(4))
    assert len(list(enumerate_full_covers(path(2), 3, [(0, 1)]))) == 1
    space = FullCoverSpace.build(complete_minus(5), 4)
    assert space.size == 5 * 24 ** 4


def test_enumeration_budget_and_resume():
    g = cycle(4)
    space = FullCoverSpace.build(g, 3)
    seen = []
    with pytest.raises(BudgetExceeded) as exc:
        for c in enumerate_full_covers(g, 3, budget=2):
            seen.append(c)
    seen.extend(enumerate_full_covers(g, 3, start=exc.value.resume))
    assert seen == list(space)


def test_full_cover_space_reaches_every_cover_up_to_relabelling():
    """Every full 3-fold cover of C4 untwists (on the space's forest) to a cover
    conjugate to one in the space."""
    g = cycle(4)
    space = FullCoverSpace.build(g, 3)
    free = space.free_edges[0]
    reached = {space.cover(i).edge_perm(*free) for i in range(space.size)}
    for p in all_perms(3):
        c = full_cover(g, 3, {free: p})
        d, _ = untwist(c, space.forest)
        s = d.edge_perm(*free)
        conj = {tuple(pi[s[pi.index(i)]] for i in range(3)) for pi in all_perms(3)}
        assert conj & reached


def test_two_compatibility_formulations_agree():
    rng = random.Random(7)
    g = path(2)
    for _ in range(500):
        k = rng.randint(2, 5)
        c = random_cover(g, k, rng, density=rng.random())
        ps = all_perms(k)
        a, b = ps[rng.randrange(len(ps))], ps[rng.randrange(len(ps))]
        assert compatible(c, 0, a, 1, b) == compatible_via_derangement(c, 0, a, 1, b)


def test_partial_packing_check():
    c = full_identity_cover(path(3), 2)
    assert check_partial_packing(c, {0: (0, 1), 1: (1, 0)})
    assert not check_partial_packing(c, {0: (0, 1), 1: (0, 1)})
    assert not check_partial_packing(c, {0: (0, 0)})


def test_json_round_trip():
    rng = random.Random(2)
    for g in (cycle(5), catalog("A+"), complete_minus(5)):
        c = random_cover(g, 3, rng)
        d = cover_from_json(cover_to_json(c))
        assert d == c and cover_to_json(d) == cover_to_json(c)
    lc = list_cover(cycle(4), [["a", "b"], ["b", "c"], ["c", "a"], ["a", "b"]])
    back = cover_from_json(cover_to_json(lc))
    assert back == lc and back.labels == lc.labels


def test_all_choices_enumerates_product():
    c = Cover(path(3), [2, 3, 1])
    assert len(list(all_choices(c))) == 6
