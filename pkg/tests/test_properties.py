"""Cross-module properties, 1000 random instances each."""
from __future__ import annotations

import itertools
import random
from fractions import Fraction as Q

import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from packlab import derangement_lab as dl
from packlab import fractional_lp as flp
from packlab.cover_model import UNMATCHED, Cover, untwist
from packlab.graph_core import Graph, complete, cycle, path
from packlab.lemma_verifier import random_sparse_graph
from packlab.packing_search import count_transversals, find_packing, random_cover, random_full_cover

N = 1000
PROPS = settings(max_examples=N, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def perm_oracle(m) -> int:
    n = len(m)
    return sum(1 for p in itertools.permutations(range(n)) if all(m[i][p[i]] for i in range(n)))


def random_graph(rng: random.Random, n: int, p: float) -> Graph:
    return Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])


def random_forest(rng: random.Random, g: Graph):
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    es = list(g.edges)
    rng.shuffle(es)
    out = []
    for u, v in es:
        ru, rv = find(u), find(v)
        if ru != rv and rng.random() < 0.8:
            parent[ru] = rv
            out.append((u, v))
    return out


def random_sized_cover(rng: random.Random, g: Graph, lo: int, hi: int) -> Cover:
    sizes = [rng.randint(lo, hi) for _ in range(g.n)]
    maps = {}
    for u, v in g.edges:
        s, t = sizes[u], sizes[v]
        img = [UNMATCHED] * s
        for i, j in zip(rng.sample(range(s), min(s, t)), rng.sample(range(t), min(s, t))):
            if rng.random() < 0.9:
                img[i] = j
        maps[(u, v)] = tuple(img)
    return Cover(g, sizes, maps)


seeds = st.integers(0, 2 ** 32 - 1)


@PROPS
@given(n=st.integers(1, 6), seed=seeds, p=st.floats(0.2, 0.95))
def test_permanent_matches_brute_force(n, seed, p):
    rng = np.random.default_rng(seed)
    m = (rng.random((n, n)) < p).astype(np.int64)
    want = perm_oracle(m.tolist())
    assert dl.permanent(m) == want
    assert dl.permanent_ryser(m) == want


@PROPS
@given(k=st.integers(2, 6), r=st.integers(1, 5), data=st.data())
def test_common_derangements_two_routes(k, r, data):
    ps = [tuple(data.draw(st.permutations(range(k)))) for _ in range(r)]
    assert dl.common_derangements(ps) == dl.common_derangements_direct(ps)


@PROPS
@given(seed=seeds, shape=st.sampled_from(["path", "cycle", "K4", "random"]), k=st.integers(2, 4),
       density=st.floats(0.3, 1.0))
def test_packing_implies_uniform_distribution_feasible(seed, shape, k, density):
    rng = random.Random(seed)
    n = rng.randint(3, 6)
    g = {"path": path(n), "cycle": cycle(n), "K4": complete(4), "random": random_graph(rng, n, 0.5)}[shape]
    c = random_cover(g, k, rng, density=density)
    p = find_packing(c)
    assume(p is not None)
    d = flp.TransversalDistribution(p.rows(), [Q(1, k)] * k)
    assert d.is_valid(c)
    assert flp.is_feasible(c)


@PROPS
@given(seed=seeds, n=st.integers(2, 7), k=st.integers(2, 4), p=st.floats(0.2, 0.8))
def test_untwist_preserves_transversal_counts(seed, n, k, p):
    rng = random.Random(seed)
    g = random_graph(rng, n, p)
    c = random_full_cover(g, k, rng)
    forest = random_forest(rng, g)
    d, rel = untwist(c, forest)
    assert all(d.map(u, v) == tuple(range(k)) for u, v in forest)
    assert count_transversals(d) == count_transversals(c)
    assert len(flp.enumerate_transversals(d)) == len(flp.enumerate_transversals(c))


@PROPS
@given(seed=seeds, shape=st.sampled_from(["path", "cycle", "random"]), added=st.integers(0, 2))
def test_monotonicity_never_refuted(seed, shape, added):
    rng = random.Random(seed)
    n = rng.randint(3, 5)
    g = {"path": path(n), "cycle": cycle(n), "random": random_graph(rng, n, 0.5)}[shape]
    c = random_sized_cover(rng, g, 2, 3)
    assume(flp.is_feasible(c))
    assert flp.check_monotonicity(c, rng.randrange(n), added)


@PROPS
@given(seed=seeds, extra=st.integers(0, 4),
       pairs=st.lists(st.tuples(st.integers(0, 7), st.integers(0, 7)), min_size=5, max_size=5, unique=True))
def test_check_five_pairs_never_refuted(seed, extra, pairs):
    m = random_sparse_graph(random.Random(seed), 3, extra)
    assert m.sum(axis=0).min() >= 3 and m.sum(axis=1).min() >= 3
    assume(dl.permanent(m) > 24)
    assert dl.check_five_pairs(m, pairs)
