from __future__ import annotations

import itertools
import random
from fractions import Fraction as Q

import pytest

from packlab import fractional_lp as flp
from packlab.constructions import k5_minus_bad_cover_raw, nonextendable_fractional_example, outerplanar_2tree_cover
from packlab.cover_model import UNMATCHED, Cover, full_identity_cover, is_transversal
from packlab.graph_core import Graph, cycle, path
from packlab.simplex import check_farkas, feasible_point, maximize


def random_max_cover(g: Graph, sizes, rng, density=1.0) -> Cover:
    maps = {}
    for u, v in g.edges:
        s, t = sizes[u], sizes[v]
        img = [UNMATCHED] * s
        for i, j in zip(rng.sample(range(s), min(s, t)), rng.sample(range(t), min(s, t))):
            if rng.random() < density:
                img[i] = j
        maps[(u, v)] = tuple(img)
    return Cover(g, sizes, maps)


def test_simplex_small_lp():
    sol = maximize([1, 1], [[1, 2], [3, 1]], [4, 6])
    assert sol.value == Q(14, 5)
    res = feasible_point([[1, 1], [1, 1]], [1, 2])
    assert not res.feasible and check_farkas([[1, 1], [1, 1]], [1, 2], res.farkas)
    res = feasible_point([[1, 1]], [1])
    assert res.feasible and sum(res.x) == 1


def test_simplex_results_certify_themselves():
    """Feasible points satisfy A x = b exactly, infeasible ones carry a Farkas
    vector, and optimal solutions match a feasible dual of equal value."""
    rng = random.Random(11)
    seen = set()
    for _ in range(300):
        m, n = rng.randint(1, 5), rng.randint(1, 7)
        A = [[Q(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)] for _ in range(m)]
        b = [Q(rng.randint(-4, 4), rng.randint(1, 2)) for _ in range(m)]
        res = feasible_point(A, b)
        seen.add(res.feasible)
        if res.feasible:
            assert all(x >= 0 for x in res.x)
            assert all(sum(a * x for a, x in zip(row, res.x)) == bi for row, bi in zip(A, b))
        else:
            assert check_farkas(A, b, res.farkas)
        # bounded maximisation: nonnegative A with a positive entry in every column
        P = [[Q(rng.randint(0, 3), rng.randint(1, 2)) for _ in range(n)] for _ in range(m)]
        for j in range(n):
            P[rng.randrange(m)][j] += 1
        c = [Q(rng.randint(-2, 5)) for _ in range(n)]
        ub = [Q(rng.randint(0, 6), rng.randint(1, 3)) for _ in range(m)]
        sol = maximize(c, P, ub)
        assert all(x >= 0 for x in sol.x) and all(y >= 0 for y in sol.dual)
        assert all(sum(a * x for a, x in zip(row, sol.x)) <= u for row, u in zip(P, ub))
        assert all(sum(sol.dual[i] * P[i][j] for i in range(m)) >= c[j] for j in range(n))
        assert sum(y * u for y, u in zip(sol.dual, ub)) == sol.value == sum(a * x for a, x in zip(c, sol.x))
    assert seen == {True, False}


def test_enumerate_transversals_examples():
    assert len(flp.enumerate_transversals(full_identity_cover(path(2), 2))) == 2
    assert len(flp.enumerate_transversals(k5_minus_bad_cover_raw())) == 54
    inst = outerplanar_2tree_cover()
    assert len(flp.enumerate_transversals(inst.cover)) > 0


def test_enumerate_transversals_matches_brute_force():
    rng = random.Random(0)
    for _ in range(40):
        g = rng.choice([cycle(4), cycle(5), path(4)])
        sizes = [rng.randint(1, 3) for _ in range(g.n)]
        c = random_max_cover(g, sizes, rng, density=0.7)
        want = [t for t in itertools.product(*(range(s) for s in sizes)) if is_transversal(c, t)]
        assert sorted(flp.enumerate_transversals(c)) == sorted(want)


def test_fig4_cover_infeasible_with_certificates():
    inst = outerplanar_2tree_cover()
    c = inst.cover
    res = flp.has_fractional_packing(c)
    assert isinstance(res, flp.FractionalClique)
    ok, total = flp.verify_fractional_clique(c, res)
    assert ok and total > 3
    ok, total = flp.verify_fractional_clique(c, inst.extra["weights"])
    assert ok and total == Q(22, 7)
    doubled = {x: 2 * w for x, w in inst.extra["weights"].items()}
    assert not flp.verify_fractional_clique(c, doubled)[0]


def test_fig4_independent_sets_bounded():
    inst = outerplanar_2tree_cover()
    c = inst.extra["drawn"]
    black = {x for x, w in inst.extra["weights"].items() if w == Q(2, 7)}
    assert len(black) == 7
    for s in flp.maximal_independent_sets(c):
        assert len(s) <= 6
        assert len(black & set(s)) <= 3


def test_zero_weights_valid():
    c = full_identity_cover(cycle(3), 3)
    ok, total = flp.verify_fractional_clique(c, {(v, i): Q(0) for v in range(3) for i in range(3)})
    assert ok and total == 0


def test_feasible_examples():
    c = full_identity_cover(path(2), 2)
    d = flp.has_fractional_packing(c)
    assert isinstance(d, flp.TransversalDistribution) and d.is_valid(c)
    assert sorted(d.weights) == [Q(1, 2), Q(1, 2)]
    for c in flp.cycle_covers([3, 3, 3, 2]):
        d = flp.has_fractional_packing(c)
        assert isinstance(d, flp.TransversalDistribution) and d.is_valid(c)


def test_mixed_sizes_infeasible_gives_farkas():
    rep = flp.cycle_profiles(5)
    assert rep.two_three_witness is not None
    res = flp.has_fractional_packing(rep.two_three_witness)
    assert isinstance(res, flp.FarkasCertificate)
    assert flp.check_certificate(rep.two_three_witness, res)


def test_k_fold_infeasible_clique_exceeds_k():
    rng = random.Random(1)
    found = 0
    for _ in range(200):
        c = random_max_cover(cycle(4), [2] * 4, rng)
        res = flp.has_fractional_packing(c)
        if isinstance(res, flp.FractionalClique):
            found += 1
            ok, total = flp.verify_fractional_clique(c, res)
            assert ok and total > 2
        else:
            assert res.is_valid(c)
    assert found > 0


def test_monotonicity_examples():
    c = flp.cycle_covers([3, 3, 3, 2])[0]
    assert flp.check_monotonicity(c, 3, 1)
    assert flp.check_monotonicity(c, 0, 0)
    with pytest.raises(flp.PreconditionError):
        flp.check_monotonicity(flp.cycle_profiles(5).two_three_witness, 0, 1)


def test_compose_via_t_cycle():
    """C6 with 3-lists at 0, 2, 3, 5: T is the path 3-4-5 between the two
    pairs of adjacent 3-lists."""
    rng = random.Random(2)
    g = cycle(6)
    for _ in range(30):
        c = random_max_cover(g, [3, 2, 3, 3, 2, 3], rng, density=0.9)
        d = flp.compose_via_T(c, [3, 4, 5])
        assert d.is_valid(c)


def test_compose_via_t_whole_graph():
    c = full_identity_cover(cycle(3), 3)
    d = flp.compose_via_T(c, [0, 1, 2])
    assert d.is_valid(c)


def test_compose_via_t_hypothesis_errors():
    inst = nonextendable_fractional_example()
    with pytest.raises(flp.HypothesisError) as exc:
        flp.compose_via_T(inst.cover, [0, 1])
    assert exc.value.condition == "(i)"
    c = Cover(path(3), [3, 3, 2], {(0, 1): (0, 1, 2), (1, 2): (0, 1, UNMATCHED)})
    with pytest.raises(flp.HypothesisError) as exc:
        flp.compose_via_T(c, [0, 1])
    assert exc.value.condition == "(ii)"


def test_nonextendable_example():
    inst = nonextendable_fractional_example()
    res = inst.verify()
    assert all(ok for _, _, ok in res.values()), res


def test_suppress_degree2_c5_all_twos():
    for c in flp.cycle_covers([2, 2, 2, 2, 2]):
        det = flp.suppress_degree2_details(c, 0)
        assert det.reduced_feasible == det.original_feasible
        assert det.ok


def test_suppress_degree2_aligned_232():
    g = path(3)
    # a 2-3-2 path closed into a 4-cycle so that u and w are not adjacent
    g4 = cycle(4)
    c4 = Cover(g4, [2, 3, 2, 3], {(0, 1): (0, 1), (1, 2): (0, 1, UNMATCHED), (2, 3): (0, 1), (0, 3): (1, 0)})
    det = flp.suppress_degree2_details(c4, 1)
    assert det.case == "aligned"
    if det.reduced_feasible:
        assert det.lifted is not None
        m = det.lifted.marginals(c4)
        assert all(m[(1, i)] == Q(1, 3) for i in range(3))
    assert flp.suppress_degree2(c4, 1)
    with pytest.raises(flp.PreconditionError):
        flp.suppress_degree2(Cover(g, [2, 3, 2], {(0, 1): (0, 1)}), 0)


def test_suppress_degree2_twisted_mixture():
    rng = random.Random(5)
    seen = 0
    for _ in range(60):
        sizes = [2, 3, 2, 3, 3, 3]
        c = random_max_cover(cycle(6), sizes, rng)
        try:
            det = flp.suppress_degree2_details(c, 1)
        except flp.PreconditionError:
            continue
        assert det.ok
        if det.case == "twisted" and det.reduced_feasible:
            seen += 1
            assert det.mixture == (Q(2, 3), Q(1, 3))
            assert det.lifted.is_valid(c)
    assert seen > 0


def test_cycle_profiles_small():
    for n in (3, 4, 5):
        rep = flp.cycle_profiles(n)
        assert rep.all_feasible
    assert flp.cycle_profiles(3).profiles == [(3, 3, 3)]


def test_series_join_table():
    assert flp.verify_series_join_table()
    chk = flp.series_join_marginals()
    assert chk.total == 1
    assert chk.x1x2[(1, 2)] == Q(1, 18) + Q(1, 9) == Q(1, 6)
    assert chk.x1y2[(1, 1)] == Q(1, 9)
    broken = list(flp.SERIES_JOIN_TABLE)
    broken[0] = (broken[0][0], Q(1, 9))
    assert not flp.series_join_marginals(broken).ok


def test_json_uses_exact_strings():
    inst = outerplanar_2tree_cover()
    js = flp.has_fractional_packing(inst.cover).to_json()
    assert js["type"] == "clique"
    assert all("/" in w or w.isdigit() for w in js["weights"].values())
    assert flp.pq(Q(22, 7)) == "22/7" and flp.pq(Q(3)) == "3/1"
