"""Explicit graphs and covers, each carrying machine-checkable claims.

Claims are stored as callables; ``ConstructedInstance.verify()`` runs them
afresh every time so no verdict is cached.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from . import fractional_lp as flp
from .cover_model import Cover, FullCoverSpace, cover_to_json, full_cover, list_cover
from .graph_core import Graph, complete_minus, girth, is_planar, k23_plus_edge as _k23, mad, write_graph
from .packing_search import count_transversals, find_packing, random_full_cover

Q = Fraction


@dataclass
class Claim:
    name: str
    expected: Any
    check: Callable[[], Any]
    note: str = ""


@dataclass
class ConstructedInstance:
    name: str
    graph: Graph
    cover: Optional[Cover]
    claims: List[Claim] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)

    def verify(self, skip: Sequence[str] = ()) -> Dict[str, Tuple[Any, Any, bool]]:
        out = {}
        for cl in self.claims:
            if cl.name in skip:
                continue
            got = cl.check()
            out[cl.name] = (got, cl.expected, got == cl.expected)
        return out

    def manifest(self, results: Optional[Dict[str, Tuple[Any, Any, bool]]] = None) -> Dict:
        claims = []
        for cl in self.claims:
            item = {"name": cl.name, "expected": _jsonable(cl.expected), "note": cl.note}
            if results is not None and cl.name in results:
                got, _, ok = results[cl.name]
                item.update(observed=_jsonable(got), ok=ok)
            claims.append(item)
        return {"name": self.name, "graph": {"n": self.graph.n, "edges": [list(e) for e in self.graph.edges]},
                "claims": claims}

    def write(self, outdir: str, results=None) -> List[str]:
        import os

        os.makedirs(outdir, exist_ok=True)
        paths = []
        p = os.path.join(outdir, f"{self.name}.graph")
        with open(p, "w") as fh:
            fh.write(write_graph(self.graph))
        paths.append(p)
        if self.cover is not None:
            p = os.path.join(outdir, f"{self.name}.cover.json")
            with open(p, "w") as fh:
                fh.write(cover_to_json(self.cover))
            paths.append(p)
        p = os.path.join(outdir, f"{self.name}.claims.json")
        with open(p, "w") as fh:
            json.dump(self.manifest(results), fh, indent=2)
        paths.append(p)
        return paths


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (list, tuple)):
        return [_jsonable(y) for y in x]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    return x


# ---------------------------------------------------------------------------
# girth construction: three odd cycles tied together by long paths


LIST_X, LIST_Y, LIST_Z = (1, 2, 3), (1, 2, 4), (1, 3, 4)


def girth_construction(g: int) -> ConstructedInstance:
    """Three odd cycles A, B, C of length n (smallest odd n >= g).  Position i
    (1-based) gets lists X/Y/Z on A/B/C when i is odd and Y/Z/X when i is even.
    Same-parity vertices a_i, a_{i+2} are joined by a path of length g drawn
    inside the cycle for odd i and outside for even i; paths a_1-c_2,
    b_1-a_2 and c_1-b_2 tie the cycles together.  Path vertices inherit the
    list of their ends."""
    if g < 3:
        raise ValueError("g must be at least 3")
    n = g if g % 2 else g + 1
    edges: List[Tuple[int, int]] = []
    lists: List[Tuple[int, ...]] = []
    names: List[str] = []

    def new_vertex(lst, name):
        lists.append(lst)
        names.append(name)
        return len(lists) - 1

    pattern = {"a": (LIST_X, LIST_Y), "b": (LIST_Y, LIST_Z), "c": (LIST_Z, LIST_X)}
    cyc: Dict[str, List[int]] = {}
    for name, (odd, even) in pattern.items():
        vs = [new_vertex(odd if i % 2 == 1 else even, f"{name}{i}") for i in range(1, n + 1)]
        cyc[name] = vs
        for i in range(n):
            edges.append((vs[i], vs[(i + 1) % n]))

    def join(x, y, tag):
        assert lists[x] == lists[y]
        prev = x
        for s in range(g - 1):
            v = new_vertex(lists[x], f"{tag}.{s}")
            edges.append((prev, v))
            prev = v
        edges.append((prev, y))

    for name, vs in cyc.items():
        for i in range(1, n - 1):  # 1-based i from 1 to n-2
            join(vs[i - 1], vs[i + 1], f"{name}{i}-{name}{i + 2}")
    join(cyc["a"][0], cyc["c"][1], "a1-c2")
    join(cyc["b"][0], cyc["a"][1], "b1-a2")
    join(cyc["c"][0], cyc["b"][1], "c1-b2")
    graph = Graph(len(lists), edges)
    cover = list_cover(graph, lists)
    inst = ConstructedInstance(f"girth{g}", graph, cover, extra={"n": n, "names": names, "lists": lists})
    inst.claims = [
        Claim("planar", True, lambda: bool(is_planar(graph))),
        Claim("girth_at_least_g", True, lambda: girth(graph) >= g),
        Claim("same_list_classes_connected", True, lambda: same_list_classes_connected(graph, lists)),
        Claim("no_3_packing", True, lambda: find_packing(cover) is None),
    ]
    return inst


def same_list_classes_connected(graph: Graph, lists: Sequence[Sequence[int]]) -> bool:
    by_list: Dict[Tuple[int, ...], List[int]] = {}
    for v, lst in enumerate(lists):
        by_list.setdefault(tuple(lst), []).append(v)
    for vs in by_list.values():
        sub, _ = graph.induced(vs)
        if not sub.is_connected():
            return False
    return True


# ---------------------------------------------------------------------------
# the bad 4-fold cover of K5 minus an edge


# vertices a..e = 0..4, missing edge a-c.  The bold edges carry a 3-cycle on
# three of the four colours, the dashed edges the identity.
K5_MINUS_TWIST = (0, 2, 3, 1)
K5_MINUS_TWIST2 = (0, 3, 1, 2)


def k5_minus_bad_cover_raw() -> Cover:
    g = complete_minus(5)
    return full_cover(g, 4, {(0, 4): K5_MINUS_TWIST, (1, 0): K5_MINUS_TWIST,
                             (2, 1): K5_MINUS_TWIST2, (3, 2): K5_MINUS_TWIST2})


def k5_minus_bad_cover(samples: int = 200, seed: int = 0) -> ConstructedInstance:
    cover = k5_minus_bad_cover_raw()
    g = cover.graph

    def five_fold_sample():
        rng = random.Random(seed)
        return all(find_packing(random_full_cover(g, 5, rng)) is not None for _ in range(samples))

    inst = ConstructedInstance("k5_minus", g, cover)
    inst.claims = [
        Claim("transversals", 54, lambda: count_transversals(cover)),
        Claim("no_packing", True, lambda: find_packing(cover) is None),
        Claim("five_fold_sample_packs", True, five_fold_sample, note=f"{samples} random full 5-fold covers"),
        Claim("unique_bad_class", 1, lambda: k5_minus_bad_classes(cover)[0],
              note="whole-space scan; long-running"),
    ]
    return inst


def k5_minus_bad_classes(reference: Optional[Cover] = None, jobs: int = 1):
    """Scan every tree-reduced full 4-fold cover of K5-, collect the ones
    without a packing and merge them up to relabelling and automorphisms.
    Returns (#classes with automorphisms, #classes without, #failures,
    reference cover in the class?)."""
    from .cover_model import canonical_full_cover_key
    from .packing_search import scan_space

    g = complete_minus(5)
    space = FullCoverSpace.build(g, 4)
    verdict = scan_space(space, jobs=jobs)
    fails = [space.cover(i) for i in verdict.failures]
    auts = g.automorphisms()
    keys_aut = {canonical_full_cover_key(c, space.forest, auts) for c in fails}
    keys_plain = {canonical_full_cover_key(c, space.forest) for c in fails}
    contains = None
    if reference is not None:
        contains = canonical_full_cover_key(reference, space.forest, auts) in keys_aut
    return len(keys_aut), len(keys_plain), verdict.total_failures, contains


# ---------------------------------------------------------------------------
# outerplanar 2-tree cover with a fractional clique of weight 22/7


# graph vertices: x1, x2, x3 (triangle), x12, x13, x23
OUTERPLANAR_LISTS = {0: (0, 1, 2), 1: (6, 7, 8), 2: (3, 4, 5), 3: (9, 10), 4: (12, 14), 5: (16, 17)}
OUTERPLANAR_EDGES = (
    (0, 3), (1, 4), (2, 5), (0, 6), (2, 7), (1, 8), (3, 7), (4, 6), (5, 8),
    (9, 0), (9, 6), (10, 1), (10, 7), (12, 1), (12, 3), (14, 2), (14, 5),
    (16, 4), (16, 7), (17, 5), (17, 8),
)
OUTERPLANAR_BLACK = frozenset({0, 1, 2, 5, 6, 7, 8})


def cover_from_labelled_edges(graph: Graph, lists: Dict[int, Sequence[int]],
                              h_edges: Sequence[Tuple[int, int]]) -> Cover:
    owner = {x: v for v, lst in lists.items() for x in lst}
    maps: Dict[Tuple[int, int], List[int]] = {}
    for a, b in h_edges:
        u, v = owner[a], owner[b]
        if u > v:
            a, b, u, v = b, a, v, u
        if not graph.has_edge(u, v):
            raise ValueError(f"cover edge {a}-{b} joins non-adjacent vertices")
        t = maps.setdefault((u, v), [-1] * len(lists[u]))
        t[list(lists[u]).index(a)] = list(lists[v]).index(b)
    return Cover(graph, [len(lists[v]) for v in range(graph.n)], maps,
                 [list(lists[v]) for v in range(graph.n)])


def outerplanar_2tree_graph() -> Graph:
    return Graph(6, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (0, 4), (2, 4), (1, 5), (2, 5)])


def outerplanar_weights(cover: Cover) -> Dict[Tuple[int, int], Fraction]:
    w = {}
    for v in range(cover.n):
        for i, x in enumerate(cover.labels[v]):
            w[(v, i)] = Q(2, 7) if x in OUTERPLANAR_BLACK else Q(1, 7)
    return w


def outerplanar_2tree_cover() -> ConstructedInstance:
    """The drawn cover (three 3-lists, three 2-lists) and the 3-fold cover
    obtained by giving each 2-list one extra unmatched colour."""
    g = outerplanar_2tree_graph()
    drawn = cover_from_labelled_edges(g, OUTERPLANAR_LISTS, OUTERPLANAR_EDGES)
    padded = drawn
    for v in (3, 4, 5):
        padded = padded.add_colors(v, 1)
    weights = outerplanar_weights(drawn)

    def solver_certificate():
        res = flp.has_fractional_packing(padded)
        if not isinstance(res, flp.FractionalClique):
            return None
        ok, total = flp.verify_fractional_clique(padded, res)
        return ok and total > 3

    inst = ConstructedInstance("outerplanar_2tree", g, padded, extra={"drawn": drawn, "weights": weights})
    inst.claims = [
        Claim("padded_infeasible", True, lambda: not flp.is_feasible(padded)),
        Claim("stated_weights", (True, Q(22, 7)), lambda: flp.verify_fractional_clique(padded, weights)),
        Claim("solver_certificate_above_3", True, solver_certificate),
        Claim("drawn_has_no_transversal", 0, lambda: len(flp.enumerate_transversals(drawn)),
              note="why the padded 3-fold cover is the instance checked"),
        Claim("outerplanar", True, lambda: is_outerplanar(g)),
    ]
    return inst


def is_outerplanar(g: Graph) -> bool:
    # apex trick: G is outerplanar iff G + universal vertex is planar
    apex = g.n
    return bool(is_planar(Graph(g.n + 1, list(g.edges) + [(v, apex) for v in range(g.n)])))


# ---------------------------------------------------------------------------
# a fractional packing outside K2 that does not extend


NONEXT_COLOURINGS = ((0, 0, 0, 0), (1, 2, 1, 2), (2, 3, 2, 3), (3, 1, 3, 1))


def nonextendable_fractional_example() -> ConstructedInstance:
    """T = {u, v} = {0, 1}; u has pendant neighbours 2, 3 and v has 4, 5; all
    matchings are identities on four colours.  The outside colourings of
    (2, 3, 4, 5) are taken with probability 1/4 each."""
    g = Graph(6, [(0, 1), (0, 2), (0, 3), (1, 4), (1, 5)])
    cover = full_cover(g, 4, {})
    outside = [({2: a, 3: b, 4: c, 5: d}, Q(1, 4)) for a, b, c, d in NONEXT_COLOURINGS]

    def marginals():
        out = {}
        for col, p in outside:
            for v, x in col.items():
                out[(v, x)] = out.get((v, x), Q(0)) + p
        return all(p == Q(1, 4) for p in out.values()) and len(out) == 16

    def drop_one():
        g2 = Graph(5, [(0, 1), (0, 2), (1, 3), (1, 4)])
        c2 = full_cover(g2, 4, {})
        # vertex 3 (second neighbour of u) removed; v's pendants renumbered 3, 4
        out2 = [({2: col[2], 3: col[4], 4: col[5]}, p) for col, p in outside]
        return flp.extend_distribution(c2, [0, 1], out2)[0]

    def hypothesis():
        try:
            flp.compose_via_T(cover, [0, 1])
        except flp.HypothesisError as e:
            return e.condition
        return None

    inst = ConstructedInstance("nonextendable", g, cover, extra={"outside": outside})
    inst.claims = [
        Claim("extends", False, lambda: flp.extend_distribution(cover, [0, 1], outside)[0]),
        Claim("outside_marginals_quarter", True, marginals),
        Claim("drop_one_neighbour_extends", True, drop_one),
        Claim("composition_hypothesis_violated", "(i)", hypothesis),
    ]
    return inst


# ---------------------------------------------------------------------------
# K_{2,3} plus an edge


def induced_subtrees_one_outside(g: Graph) -> List[Tuple[int, ...]]:
    """Vertex sets inducing a tree in which every vertex has exactly one
    neighbour outside the set."""
    out = []
    for r in range(1, g.n + 1):
        for vs in combinations(range(g.n), r):
            sub, _ = g.induced(vs)
            if not sub.is_connected() or sub.m != r - 1:
                continue
            s = set(vs)
            if all(sum(1 for w in g.neighbors(v) if w not in s) == 1 for v in vs):
                out.append(vs)
    return out


def k23_witness_cover(g: Optional[Graph] = None) -> Optional[Cover]:
    """First tree-reduced full 3-fold cover without a fractional packing."""
    g = g or _k23()
    space = FullCoverSpace.build(g, 3)
    for idx in range(space.size):
        c = space.cover(idx)
        if not flp.is_feasible(c):
            return c
    return None


def k23_plus_edge() -> ConstructedInstance:
    g = _k23()
    witness = k23_witness_cover(g)

    def witness_check():
        res = flp.has_fractional_packing(witness)
        if not isinstance(res, flp.FractionalClique):
            return False
        ok, total = flp.verify_fractional_clique(witness, res)
        return ok and total > 3

    def almost_cubic():
        degs = sorted(g.degree(v) for v in range(g.n))
        two_connected = all(g.induced([x for x in range(g.n) if x != v])[0].is_connected() for v in range(g.n))
        return degs == [2] + [3] * (g.n - 1) and two_connected

    inst = ConstructedInstance("k23_plus_edge", g, witness)
    inst.claims = [
        Claim("mad", Q(14, 5), lambda: mad(g).value),
        Claim("almost_cubic", True, almost_cubic),
        Claim("qualifying_subtrees", [], lambda: induced_subtrees_one_outside(g)),
        Claim("witness_infeasible_certified", True, witness_check),
    ]
    return inst


CONSTRUCTIONS = {
    "girth": girth_construction,
    "k5-minus": k5_minus_bad_cover,
    "outerplanar": outerplanar_2tree_cover,
    "nonextendable": nonextendable_fractional_example,
    "k23-plus-edge": k23_plus_edge,
}
