from __future__ import annotations

import itertools
import json
import random
import re

import numpy as np
import pytest

from packlab import lemma_verifier as lv
from packlab.cover_model import list_cover
from packlab.graph_core import Graph, cycle
from packlab.packing_search import extendable
from packlab.perms import all_perms, class_representatives, identity

PS = all_perms(4)


def compat_oracle(t, a, b) -> bool:
    return all(t[a[i]] != b[i] for i in range(len(a)))


def test_compat_table_matches_definition():
    rng = random.Random(0)
    for t in rng.sample(PS, 5):
        tab = lv.compat_table(t)
        for ia, ib in itertools.product(range(24), repeat=2):
            assert tab[ia, ib] == compat_oracle(t, PS[ia], PS[ib])


@pytest.mark.parametrize("s", class_representatives(4))
def test_triangle_table_matches_search(s):
    tab = lv.triangle_extension_table(s)
    c = lv._triangle_cover(s)
    rng = random.Random(1)
    for a, b in [(rng.randrange(24), rng.randrange(24)) for _ in range(40)]:
        assert tab[a, b] == extendable(c, {3: identity(4), 4: PS[a], 5: PS[b]}, [0, 1, 2])


def test_path_table_matches_search():
    tab = lv.path_extension_table()
    c = lv._path_cover()
    rng = random.Random(2)
    for _ in range(60):
        a, b = rng.randrange(576), rng.randrange(576)
        part = {3: identity(4), 4: PS[a // 24], 5: PS[a % 24], 6: PS[b // 24], 7: PS[b % 24]}
        assert tab[a, b] == extendable(c, part, [0, 1, 2])


def _venn(lu, lv_, lw):
    u, v, w = set(lu), set(lv_), set(lw)
    return (len(u & v & w), len((u & v) - w), len((u & w) - v), len((v & w) - u))


def test_list_triangle_structures_cover_every_venn_signature():
    lu = (0, 1, 2, 3)
    subsets = list(itertools.combinations(range(12), 4))
    want = {_venn(lu, a, b) for a in subsets for b in subsets}
    got = [_venn(*t) for t in lv._list_triangle_structures()]
    assert set(got) == want and len(got) == len(set(got))


def test_list_triangle_table_matches_search():
    """Triangle u v w with u also adjacent to pendants u1, u2 and v, w to v1, w1;
    each pendant carries its neighbour's list."""
    rng = random.Random(3)
    g = Graph(7, [(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (1, 5), (2, 6)])
    structs = lv._list_triangle_structures()
    for lu, lv_, lw in rng.sample(structs, 12):
        tab = lv.list_triangle_table(lu, lv_, lw)
        c = list_cover(g, [list(x) for x in (lu, lv_, lw, lu, lu, lv_, lw)])
        for _ in range(8):
            a, b, d = rng.randrange(24), rng.randrange(24), rng.randrange(24)
            part = {3: identity(4), 4: PS[a], 5: PS[b], 6: PS[d]}
            assert tab[a, b, d] == extendable(c, part, [0, 1, 2])


def test_c3p3_lemma_verified():
    rep = lv.verify_C3P3_lemma()
    assert rep.ok, rep.witness
    assert rep.details["triangle"]["cases"] == 5 * 24 ** 2
    assert rep.details["path"]["cases"] == 24 ** 4
    assert rep.details["replay_mismatches"] == 0 and rep.details["replayed"] > 100


def test_g8_two_colorings_verified():
    rep = lv.verify_g8_two_colorings()
    assert rep.ok and rep.details["valid_v_counts"] == [3]


def g733_oracle():
    ident = identity(4)
    der = {(a, b): compat_oracle(ident, a, b) for a in PS for b in PS}
    out = {}
    for s in class_representatives(4):
        safe = 0
        for c7 in PS:
            if not compat_oracle(s, ident, c7):
                continue
            ok = True
            for t in PS:
                z = {c3 for c3 in PS if der[c3, c7] and any(
                    der[ident, c2] and der[c2, c3] and compat_oracle(t, c2, c7) for c2 in PS)}
                if not all(any(der[c3, c4] for c3 in z) for c4 in PS):
                    ok = False
                    break
            safe += ok
        out[tuple(s)] = safe
    return out


def test_g733_safe_counts_match_loops():
    counts, _ = lv.g733_safe_counts()
    assert counts == g733_oracle()
    assert counts[identity(4)] == 9


def test_g733_fast_verified():
    rep = lv.verify_g733()
    assert rep.ok


def _canon_key(g: Graph, lists, free):
    """Matched index pairs per edge, canonical under relabelling the lists of
    the vertices in ``free``."""
    ls = [sorted(x) for x in lists]
    best = None
    choices = [all_perms(3) if v in free else [(0, 1, 2)] for v in range(g.n)]
    for rel in itertools.product(*choices):
        key = tuple(tuple(sorted((rel[u][ls[u].index(x)], rel[v][ls[v].index(x)]) for x in set(ls[u]) & set(ls[v])))
                    for u, v in g.edges)
        if best is None or key < best:
            best = key
    return best


@pytest.mark.parametrize("n", [3, 4])
def test_cycle_list_systems_reach_every_list_cover(n):
    g = cycle(n)
    free = set(range(2, n))
    ours = {_canon_key(g, x, free) for x in lv.cycle_list_systems(n)}
    naive = set()
    for rest in itertools.product(itertools.combinations(range(3 * n), 3), repeat=n - 2):
        naive.add(_canon_key(g, [(0, 1, 2), (0, 1, 2)] + list(rest), free))
    assert ours == naive


def test_cycle_prepacking_small():
    for n in (3, 4, 5):
        rep = lv.verify_cycle_prepacking(n)
        assert rep.ok
    with pytest.raises(ValueError):
        lv.verify_cycle_prepacking(8)


def test_five_pairs_adversary_finds_planted_pairs():
    # rows 0..3 forced onto the diagonal, rows 4..7 form K_{4,4}: 24 matchings
    m = np.zeros((8, 8), dtype=np.int64)
    for i in range(4):
        m[i, i] = 1
    m[4:, 4:] = 1
    assert len(lv.perfect_matchings(m)) == 24
    pairs, _ = lv.five_pairs_adversary(m)
    assert pairs is not None
    assert {(i, i) for i in range(4)} <= set(pairs)


def adversary_oracle(m: np.ndarray) -> bool:
    pms = lv.perfect_matchings(m)
    edges = [tuple(e) for e in np.argwhere(m)]
    for five in itertools.combinations(edges, 5):
        rows = np.array([a for a, _ in five])
        cols = np.array([b for _, b in five])
        if ((pms[:, rows] == cols[None, :]).sum(axis=1) >= 4).all():
            return True
    return False


def test_five_pairs_adversary_matches_exhaustive_sets():
    rng = random.Random(4)
    outcomes = set()
    for i in range(6):
        m = lv.random_sparse_graph(rng, 3, 0)
        if i % 2:
            # two forced rows lower the matching count so that bad pairs exist
            m[0, :] = 0
            m[0, 0] = 1
            m[1, :] = 0
            m[1, 1] = 1
        if not len(lv.perfect_matchings(m)):
            continue
        pairs, _ = lv.five_pairs_adversary(m)
        assert (pairs is not None) == adversary_oracle(m)
        outcomes.add(pairs is not None)
    assert outcomes == {True, False}


def test_five_pairs_report():
    rep = lv.verify_five_pairs(samples=200)
    assert rep.ok and rep.details["graphs_meeting_hypothesis"] > 0


def test_registry_and_usage_errors():
    assert "series-join-table" in lv.REGISTRY
    assert not [lid for lid in lv.REGISTRY if re.search(r"lemma|\d+\.\d+", lid)]
    with pytest.raises(lv.UsageError):
        lv.verify("nope")
    with pytest.raises(lv.UsageError):
        lv.verify("k4", tier="medium")
    with pytest.raises(ValueError):
        lv.verify_small_k24("nope")


def test_verify_k4_writes_state(tmp_path):
    state = tmp_path / "k4.state"
    rep = lv.verify("k4", state_path=str(state))
    assert rep.ok and rep.cases_checked == 2880
    assert json.loads(state.read_text())["next"] == 2880
    # a finished state file resumes to nothing left to check
    rep = lv.verify("k4", state_path=str(state))
    assert rep.ok and rep.cases_checked == 0


def test_verify_a_plus_budget_times_out_with_resume():
    rep = lv.verify("a-plus", tier="full", budget=1)
    assert rep.status == lv.TIMEOUT and rep.resume == 10 ** 6


def test_run_all_subset_and_json():
    reps = lv.run_all("fast", only=["series-join-table", "g8-two-colorings", "k23-plus-edge"])
    assert [r.lemma_id for r in reps] == ["g8-two-colorings", "series-join-table", "k23-plus-edge"]
    for r in reps:
        doc = json.loads(json.dumps(r.to_json()))
        assert doc["status"] == lv.VERIFIED and doc["details"]["tier"] == "fast"
    assert reps[1].to_json()["details"]["total"] == "1/1"


def test_fast_tier_skips_full_only_entries():
    full_only = {lid for lid, e in lv.REGISTRY.items() if e.fast is None}
    assert full_only == {"a-plus", "g623-plus"}


@pytest.mark.slow
@pytest.mark.parametrize("lemma_id", ["a-plus", "g623-plus"])
def test_small_graph_whole_cover_scan(lemma_id):
    rep = lv.verify(lemma_id, tier="full")
    assert rep.ok and rep.cases_checked == 39813120


@pytest.mark.slow
def test_g733_whole_cover_scan():
    rep = lv.verify("g733", tier="full")
    assert rep.ok
