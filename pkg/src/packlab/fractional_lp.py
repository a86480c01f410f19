"""Fractional packings of covers as exact linear programs.

A fractional packing of a cover is a probability distribution on its
independent transversals in which every list element x of L(v) is hit with
probability exactly 1/|L(v)|.  Feasibility is decided by an exact rational
simplex over the transversal columns; infeasible k-fold covers come with a
fractional clique of the cover graph of weight > k, mixed-size covers with a
Farkas vector of the marginal equations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

import networkx as nx

from .cover_model import UNMATCHED, BudgetExceeded, Cover, restrict
from .graph_core import Graph, cycle
from .simplex import check_farkas, feasible_point, maximize

Q = Fraction
Transversal = Tuple[int, ...]
Node = Tuple[int, int]  # (vertex, list index)


class HypothesisError(ValueError):
    """A structural hypothesis of a composition step does not hold."""

    def __init__(self, condition: str, message: str):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# transversals


def enumerate_transversals(c: Cover, budget: Optional[int] = 10 ** 7) -> List[Transversal]:
    """All independent transversals in lexicographic order (vertex 0 slowest)."""
    n = c.n
    back = [[(w, c.map(w, v)) for w in c.graph.neighbors(v) if w < v] for v in range(n)]
    out: List[Transversal] = []
    choice = [0] * n
    nodes = 0

    def rec(v: int):
        nonlocal nodes
        if v == n:
            out.append(tuple(choice))
            return
        banned = {m[choice[w]] for w, m in back[v]}
        for i in range(c.sizes[v]):
            if i not in banned:
                nodes += 1
                if budget is not None and nodes > budget:
                    raise BudgetExceeded(f"more than {budget} search nodes")
                choice[v] = i
                rec(v + 1)

    rec(0)
    return out


def pq(x: Fraction) -> str:
    """Exact 'p/q' string (denominator always written)."""
    x = Q(x)
    return f"{x.numerator}/{x.denominator}"


@dataclass
class TransversalDistribution:
    support: List[Transversal]
    weights: List[Fraction]

    def marginals(self, c: Cover) -> Dict[Node, Fraction]:
        out = {(v, i): Q(0) for v in range(c.n) for i in range(c.sizes[v])}
        for t, w in zip(self.support, self.weights):
            for v, i in enumerate(t):
                out[(v, i)] += w
        return out

    def is_valid(self, c: Cover) -> bool:
        from .cover_model import is_transversal

        if len(self.support) != len(self.weights):
            return False
        if any(w < 0 for w in self.weights) or sum(self.weights) != 1:
            return False
        if not all(is_transversal(c, t) for t in self.support):
            return False
        return all(p == Q(1, c.sizes[v]) for (v, _), p in self.marginals(c).items())

    def to_json(self) -> Dict:
        return {"type": "distribution",
                "support": [list(t) for t in self.support],
                "weights": [pq(w) for w in self.weights]}


@dataclass
class FractionalClique:
    weights: Dict[Node, Fraction]
    total: Fraction = Q(0)

    def __post_init__(self):
        self.total = sum(self.weights.values(), Q(0))

    def to_json(self) -> Dict:
        return {"type": "clique", "total": pq(self.total),
                "weights": {f"{v},{i}": pq(w) for (v, i), w in sorted(self.weights.items())}}


@dataclass
class FarkasCertificate:
    """y over the rows (one per list element, then the normalisation row)
    with y^T A <= 0 on every transversal column and y^T b > 0."""
    rows: List[Tuple]
    y: List[Fraction]
    reason: str = "farkas"

    def to_json(self) -> Dict:
        return {"type": "farkas", "reason": self.reason,
                "rows": [list(r) for r in self.rows], "y": [pq(x) for x in self.y]}


def marginal_system(c: Cover, columns: Sequence[Transversal]):
    """Rows: (v, i) for every list element, then ('sum',).  A w = b."""
    rows: List[Tuple] = [(v, i) for v in range(c.n) for i in range(c.sizes[v])]
    index = {r: t for t, r in enumerate(rows)}
    A = [[0] * len(columns) for _ in range(len(rows) + 1)]
    for j, t in enumerate(columns):
        for v, i in enumerate(t):
            A[index[(v, i)]][j] = 1
        A[-1][j] = 1
    b = [Q(1, c.sizes[v]) for v, _ in rows] + [Q(1)]
    return rows + [("sum",)], A, b


def check_certificate(c: Cover, cert: FarkasCertificate, budget: Optional[int] = 10 ** 7) -> bool:
    columns = enumerate_transversals(c, budget)
    rows, A, b = marginal_system(c, columns)
    if [tuple(r) for r in rows] != [tuple(r) for r in cert.rows]:
        return False
    if not columns:
        return sum(y * bi for y, bi in zip(cert.y, b)) > 0
    return check_farkas(A, b, cert.y)


def has_fractional_packing(c: Cover, certify: bool = True, budget: Optional[int] = 10 ** 7):
    """Decide feasibility exactly.  Returns a TransversalDistribution when
    feasible; otherwise (certify=True) a FractionalClique of total weight
    larger than every list size when one exists, else a FarkasCertificate."""
    columns = enumerate_transversals(c, budget)
    rows, A, b = marginal_system(c, columns)
    if columns:
        res = feasible_point(A, b)
        if res.feasible:
            sup = [(t, w) for t, w in zip(columns, res.x) if w != 0]
            return TransversalDistribution([t for t, _ in sup], [w for _, w in sup])
    if certify:
        # a clique heavier than the largest list also rules out the padded
        # max-size cover, hence (by monotonicity) this one
        clique = fractional_clique(c)
        if clique.total > max(c.sizes):
            return clique
    if not columns:
        # no transversal: the normalisation row alone is contradictory
        y = [Q(0)] * (len(rows) - 1) + [Q(1)]
        return FarkasCertificate(rows, y, reason="no independent transversal")
    return FarkasCertificate(rows, res.farkas)


def is_feasible(c: Cover, budget: Optional[int] = 10 ** 7) -> bool:
    return isinstance(has_fractional_packing(c, certify=False, budget=budget), TransversalDistribution)


# ---------------------------------------------------------------------------
# fractional cliques


def cover_nx(c: Cover) -> nx.Graph:
    nodes, es = c.cover_graph()
    h = nx.Graph()
    h.add_nodes_from(nodes)
    h.add_edges_from((nodes[a], nodes[b]) for a, b in es)
    return h


def maximal_independent_sets(c: Cover) -> List[List[Node]]:
    h = cover_nx(c)
    comp = nx.complement(h)
    return [sorted(s) for s in nx.find_cliques(comp)]


def fractional_clique(c: Cover) -> FractionalClique:
    """Optimal fractional clique (max sum w, every independent set <= 1),
    i.e. the fractional chromatic number of the cover graph."""
    nodes, _ = c.cover_graph()
    mis = maximal_independent_sets(c)
    idx = {x: t for t, x in enumerate(nodes)}
    A = [[0] * len(nodes) for _ in mis]
    for r, s in enumerate(mis):
        for x in s:
            A[r][idx[x]] = 1
    sol = maximize([1] * len(nodes), A, [1] * len(mis))
    return FractionalClique({x: sol.x[idx[x]] for x in nodes})


def max_weight_independent_set(c: Cover, weights: Mapping[Node, Fraction]) -> Tuple[Fraction, List[Node]]:
    """Exact branch and bound: branch on the heaviest remaining vertex."""
    nodes, es = c.cover_graph()
    nbr: Dict[Node, Set[Node]] = {x: set() for x in nodes}
    for a, b in es:
        nbr[nodes[a]].add(nodes[b])
        nbr[nodes[b]].add(nodes[a])
    w = {x: Q(weights.get(x, 0)) for x in nodes}
    best = [Q(-1), []]

    def rec(cand: Set[Node], chosen: List[Node], val: Fraction):
        if val + sum(max(w[x], 0) for x in cand) <= best[0]:
            return
        if not cand:
            best[0], best[1] = val, list(chosen)
            return
        x = max(cand, key=lambda y: (w[y], y))
        chosen.append(x)
        rec(cand - nbr[x] - {x}, chosen, val + w[x])
        chosen.pop()
        rec(cand - {x}, chosen, val)

    rec(set(nodes), [], Q(0))
    return best[0], best[1]


def verify_fractional_clique(c: Cover, w: FractionalClique | Mapping[Node, Fraction]) -> Tuple[bool, Fraction]:
    weights = w.weights if isinstance(w, FractionalClique) else dict(w)
    weights = {k: Q(v) for k, v in weights.items()}
    total = sum(weights.values(), Q(0))
    if any(not 0 <= v <= 1 for v in weights.values()):
        return False, total
    best, _ = max_weight_independent_set(c, weights)
    return best <= 1, total


# ---------------------------------------------------------------------------
# monotonicity and composition


def check_monotonicity(c: Cover, v: int, added: int) -> bool:
    """Adding unmatched colours to L(v) keeps a feasible cover feasible."""
    if added < 0:
        raise ValueError("added must be non-negative")
    if not is_feasible(c):
        raise PreconditionError("base cover has no fractional packing")
    return is_feasible(c.add_colors(v, added))


def _maximize_matching(c: Cover, u: int, v: int) -> Cover:
    """Extend the matching on uv to size min(|L(u)|, |L(v)|) (adding cover
    edges only removes transversals)."""
    t = list(c.map(u, v))
    used = {x for x in t if x != UNMATCHED}
    free_v = [j for j in range(c.sizes[v]) if j not in used]
    for i in range(len(t)):
        if t[i] == UNMATCHED and free_v:
            t[i] = free_v.pop(0)
    return c.with_matching(u, v, t)


def reduce_lists(c: Cover, keep: Sequence[Sequence[int]]) -> Tuple[Cover, List[List[int]]]:
    """Sub-cover on the kept indices (keep[v] lists old indices)."""
    pos = [{old: new for new, old in enumerate(k)} for k in keep]
    maps = {}
    for (u, v), t in c.maps.items():
        maps[(u, v)] = tuple(pos[v].get(t[old], UNMATCHED) if t[old] != UNMATCHED else UNMATCHED
                             for old in keep[u])
    return Cover(c.graph, [len(k) for k in keep], maps), [list(k) for k in keep]


def compose_via_T(c: Cover, t: Iterable[int]) -> TransversalDistribution:
    """Fractional packing of c assembled from one of c - T and, for every
    transversal I0 in its support, one of T with lists reduced by N(I0)."""
    tset = sorted(set(t))
    g = c.graph
    if not tset or any(not 0 <= x < g.n for x in tset):
        raise HypothesisError("T", "T must be a nonempty set of vertices")
    inside = set(tset)
    outside = [v for v in range(g.n) if v not in inside]
    out_nb: Dict[int, int] = {}
    for u in tset:
        nb = [w for w in g.neighbors(u) if w not in inside]
        if len(nb) > 1:
            raise HypothesisError("(i)", f"vertex {u} of T has {len(nb)} neighbours outside T")
        if nb:
            out_nb[u] = nb[0]
    for u, v in out_nb.items():
        if not 2 <= c.sizes[u] <= c.sizes[v]:
            raise HypothesisError("(ii)", f"need 2 <= |L({u})| <= |L({v})|")
    if not outside:
        res = has_fractional_packing(c, certify=False)
        if not isinstance(res, TransversalDistribution):
            raise HypothesisError("(iv)", "T itself has no fractional packing")
        return res
    aug = c
    for u, v in out_nb.items():
        aug = _maximize_matching(aug, u, v)
    g0, _ = g.induced(outside)
    c0 = restrict(aug, g0, outside)
    d0 = has_fractional_packing(c0, certify=False)
    if not isinstance(d0, TransversalDistribution):
        raise HypothesisError("(iii)", "the cover of G - T has no fractional packing")
    gt, _ = g.induced(tset)
    ct = restrict(aug, gt, tset)
    support: Dict[Transversal, Fraction] = {}
    for i0, w0 in zip(d0.support, d0.weights):
        col = dict(zip(outside, i0))
        keep = []
        for u in tset:
            banned = set()
            if u in out_nb:
                v = out_nb[u]
                banned = {i for i in range(c.sizes[u]) if aug.map(u, v)[i] == col[v]}
            keep.append([i for i in range(c.sizes[u]) if i not in banned])
        red, kept = reduce_lists(ct, keep)
        dt = has_fractional_packing(red, certify=False)
        if not isinstance(dt, TransversalDistribution):
            raise HypothesisError("(iv)", f"reduced cover of T has no fractional packing (sizes {red.sizes})")
        for it, wt in zip(dt.support, dt.weights):
            full = [0] * g.n
            for v, x in col.items():
                full[v] = x
            for a, u in enumerate(tset):
                full[u] = kept[a][it[a]]
            key = tuple(full)
            support[key] = support.get(key, Q(0)) + w0 * wt
    dist = TransversalDistribution(list(support), list(support.values()))
    if not dist.is_valid(c):
        raise HypothesisError("marginals", "assembled distribution does not have uniform marginals")
    return dist


def extend_distribution(c: Cover, t: Sequence[int], outside: Sequence[Tuple[Mapping[int, int], Fraction]]):
    """Can a distribution on colourings of G - T (given as (colouring,
    probability) pairs) be extended to a fractional packing of c?  Exact LP
    with one variable per (outside colouring, compatible transversal of T)."""
    tset = list(t)
    g = c.graph
    gt, _ = g.induced(tset)
    ct = restrict(c, gt, tset)
    inner = enumerate_transversals(ct)
    cols = []
    for s, (col, p) in enumerate(outside):
        for it in inner:
            ok = True
            for a, u in enumerate(tset):
                for w in g.neighbors(u):
                    if w in col and c.map(u, w)[it[a]] == col[w]:
                        ok = False
            if ok:
                cols.append((s, it))
    rows = [("out", s) for s in range(len(outside))] + [(u, i) for u in tset for i in range(c.sizes[u])]
    index = {r: j for j, r in enumerate(rows)}
    A = [[0] * len(cols) for _ in rows]
    for j, (s, it) in enumerate(cols):
        A[index[("out", s)]][j] = 1
        for a, u in enumerate(tset):
            A[index[(u, it[a])]][j] = 1
    b = [Q(p) for _, p in outside] + [Q(1, c.sizes[u]) for u in tset for _ in range(c.sizes[u])]
    if not cols:
        return False, None
    res = feasible_point(A, b)
    if res.feasible:
        return True, [(cols[j], x) for j, x in enumerate(res.x) if x]
    assert check_farkas(A, b, res.farkas)
    return False, (rows, res.farkas)


# ---------------------------------------------------------------------------
# suppressing a degree-2 vertex


@dataclass
class SuppressionResult:
    case: str
    reduced: List[Cover]
    reduced_feasible: bool
    original_feasible: bool
    lifted: Optional[TransversalDistribution] = None
    mixture: Tuple[Fraction, ...] = ()

    @property
    def ok(self) -> bool:
        if not self.reduced_feasible:
            return True
        return self.lifted is not None and self.original_feasible


def _reduced_graph(g: Graph, v: int, u: int, w: int) -> Tuple[Graph, List[int]]:
    keep = [x for x in range(g.n) if x != v]
    pos = {x: t for t, x in enumerate(keep)}
    es = [(pos[a], pos[b]) for a, b in g.edges if v not in (a, b)]
    es.append((pos[u], pos[w]))
    return Graph(len(keep), es), keep


def suppress_degree2_details(c: Cover, v: int) -> SuppressionResult:
    g = c.graph
    if g.degree(v) != 2:
        raise PreconditionError(f"vertex {v} does not have degree 2")
    u, w = g.neighbors(v)
    if g.has_edge(u, w):
        raise PreconditionError("neighbours of v are adjacent")
    if c.sizes[u] != 2:
        u, w = w, u
    triple = (c.sizes[u], c.sizes[v], c.sizes[w])
    if triple not in ((2, 2, 2), (2, 3, 2), (2, 2, 3)):
        raise PreconditionError(f"list sizes {triple} not covered")
    aug = _maximize_matching(_maximize_matching(c, u, v), v, w)
    g0, keep = _reduced_graph(g, v, u, w)
    pos = {x: t for t, x in enumerate(keep)}
    base_maps = {}
    for a, b in g0.edges:
        if {keep[a], keep[b]} == {u, w}:
            continue
        base_maps[(a, b)] = aug.map(keep[a], keep[b])
    sizes0 = [c.sizes[x] for x in keep]
    uv, vw = aug.map(u, v), aug.map(v, w)
    # path partner of u's colour i on w (or -1)
    path = [vw[uv[i]] if uv[i] != UNMATCHED else UNMATCHED for i in range(2)]

    def reduced_with(uw_map):
        maps = dict(base_maps)
        a, b = pos[u], pos[w]
        if a < b:
            maps[(a, b)] = tuple(uw_map)
        else:
            inv = [UNMATCHED] * c.sizes[w]
            for i, j in enumerate(uw_map):
                if j != UNMATCHED:
                    inv[j] = i
            maps[(b, a)] = tuple(inv)
        return Cover(g0, sizes0, maps)

    def lift(d0: TransversalDistribution, rule):
        sup: Dict[Transversal, Fraction] = {}
        for t0, p in zip(d0.support, d0.weights):
            for xv, q in rule(t0[pos[u]], t0[pos[w]]):
                full = [0] * g.n
                for x in keep:
                    full[x] = t0[pos[x]]
                full[v] = xv
                key = tuple(full)
                sup[key] = sup.get(key, Q(0)) + p * q
        return sup

    orig = is_feasible(c)
    if UNMATCHED not in path:
        # aligned: 1u-1v-1w and 2u-2v-2w are paths
        case = "aligned"
        red = reduced_with([path[1], path[0]])
        d0 = has_fractional_packing(red, certify=False)
        if not isinstance(d0, TransversalDistribution):
            return SuppressionResult(case, [red], False, orig)
        free = [x for x in range(c.sizes[v]) if x not in uv]

        def rule(cu, cw):
            other = uv[1 - cu]  # the v-colour on the path of u's unused colour
            if c.sizes[v] == 2:
                return [(other, Q(1))]
            return [(other, Q(2, 3)), (free[0], Q(1, 3))]

        sup = lift(d0, rule)
        dist = TransversalDistribution(list(sup), list(sup.values()))
        return SuppressionResult(case, [red], True, orig, dist if dist.is_valid(c) else None)
    # twisted: |L(v)| = 3, 1u-1v, 2u-2v-2w, 3v-1w
    case = "twisted"
    i2 = 0 if path[0] != UNMATCHED else 1  # u colour whose path reaches w
    i1 = 1 - i2
    w2 = path[i2]
    w1 = 1 - w2 if c.sizes[w] == 2 else None
    if w1 is None:
        raise PreconditionError("twisted configuration needs |L(w)| = 2")
    v1, v2 = uv[i1], uv[i2]
    v3 = [x for x in range(3) if x not in (v1, v2)][0]
    m_alpha = [None, None]
    m_alpha[i1], m_alpha[i2] = w2, w1
    m_beta = [None, None]
    m_beta[i1], m_beta[i2] = w1, w2
    ra, rb = reduced_with(m_alpha), reduced_with(m_beta)
    da = has_fractional_packing(ra, certify=False)
    db = has_fractional_packing(rb, certify=False)
    if not isinstance(da, TransversalDistribution) or not isinstance(db, TransversalDistribution):
        return SuppressionResult(case, [ra, rb], False, orig)

    def rule_a(cu, cw):
        if cu == i1:  # 1u and 1w chosen
            return [(v2, Q(1))]
        return [(v1, Q(1, 2)), (v3, Q(1, 2))]

    def rule_b(cu, cw):
        if cu == i1:  # 1u and 2w
            return [(v3, Q(1))]
        return [(v1, Q(1))]

    sa, sb = lift(da, rule_a), lift(db, rule_b)
    sup: Dict[Transversal, Fraction] = {}
    for s, f in ((sa, Q(2, 3)), (sb, Q(1, 3))):
        for key, p in s.items():
            sup[key] = sup.get(key, Q(0)) + f * p
    dist = TransversalDistribution(list(sup), list(sup.values()))
    return SuppressionResult(case, [ra, rb], True, orig, dist if dist.is_valid(c) else None,
                             (Q(2, 3), Q(1, 3)))


def suppress_degree2(c: Cover, v: int) -> bool:
    """Whenever the reduced cover(s) on G - v + uw are feasible, the lifted
    distribution is a fractional packing of c."""
    return suppress_degree2_details(c, v).ok


# ---------------------------------------------------------------------------
# cycles


def cycle_covers(sizes: Sequence[int]) -> List[Cover]:
    """Covers of C_n with the given list sizes and maximum matchings on every
    edge, up to relabelling: path edges 0-1, ..., (n-2)-(n-1) are fixed to
    canonical injections (for a 3 -> 2 step the matched pair of the 3-list is
    free), the closing edge ranges over all maximum matchings."""
    n = len(sizes)
    g = cycle(n)
    step_options = []
    for a in range(n - 1):
        s, t = sizes[a], sizes[a + 1]
        if s <= t:
            step_options.append([tuple(range(s))])
        else:
            opts = []
            for kept in _ordered_subsets(range(s), t):
                m = [UNMATCHED] * s
                for j, i in enumerate(kept):
                    m[i] = j
                opts.append(tuple(m))
            # ordering inside the smaller list is a relabelling of a+1
            opts = sorted({_canon_injection(o, t) for o in opts})
            step_options.append(opts)
    s0, sl = sizes[0], sizes[-1]
    closing = sorted(set(_max_matchings(sl, s0)))
    out = []
    for steps in product(*step_options):
        for cl in closing:
            maps = {(a, a + 1): steps[a] for a in range(n - 1)}
            maps[(n - 1, 0)] = cl
            out.append(Cover(g, sizes, maps))
    return out


def _ordered_subsets(items, r):
    from itertools import permutations
    return permutations(list(items), r)


def _canon_injection(m: Sequence[int], t: int) -> Tuple[int, ...]:
    # relabel the target so matched colours appear in increasing source order
    order = [j for j in m if j != UNMATCHED]
    rel = {j: r for r, j in enumerate(order)}
    return tuple(rel[j] if j != UNMATCHED else UNMATCHED for j in m)


def _max_matchings(s: int, t: int) -> List[Tuple[int, ...]]:
    """Maximum matchings L(a) -> L(b) with |L(a)| = s, |L(b)| = t."""
    from itertools import permutations
    out = []
    if s <= t:
        for img in permutations(range(t), s):
            out.append(tuple(img))
    else:
        for src in permutations(range(s), t):
            m = [UNMATCHED] * s
            for j, i in enumerate(src):
                m[i] = j
            out.append(tuple(m))
    return out


def size_profiles(n: int, threes: int) -> List[Tuple[int, ...]]:
    """Size vectors with ``threes`` 3-lists, rest 2, up to rotation/reflection."""
    from itertools import combinations
    seen = set()
    out = []
    for pos in combinations(range(n), threes):
        s = tuple(3 if i in pos else 2 for i in range(n))
        orbit = []
        for r in range(n):
            rot = s[r:] + s[:r]
            orbit += [rot, rot[::-1]]
        key = min(orbit)
        if key not in seen:
            seen.add(key)
            out.append(key)
    return out


@dataclass
class CycleProfileReport:
    n: int
    profiles: List[Tuple[int, ...]]
    covers_checked: int
    all_feasible: bool
    counterexample: Optional[Cover] = None
    two_three_witness: Optional[Cover] = None
    witness_certificate: Optional[FarkasCertificate] = None


def cycle_profiles(n: int, find_witness: bool = True) -> CycleProfileReport:
    if not 3 <= n <= 8:
        raise ValueError("n must be between 3 and 8")
    profs = size_profiles(n, min(3, n))
    checked = 0
    bad = None
    for prof in profs:
        for cov in cycle_covers(prof):
            checked += 1
            if not is_feasible(cov):
                bad = cov
                break
        if bad is not None:
            break
    rep = CycleProfileReport(n, profs, checked, bad is None, bad)
    if find_witness and n >= 3:
        for prof in size_profiles(n, 2):
            for cov in cycle_covers(prof):
                res = has_fractional_packing(cov)
                if not isinstance(res, TransversalDistribution):
                    rep.two_three_witness = cov
                    rep.witness_certificate = res if isinstance(res, FarkasCertificate) else None
                    return rep
    return rep


# ---------------------------------------------------------------------------
# series join table over three colours


SERIES_JOIN_TABLE: Tuple[Tuple[Tuple[int, int, int], Fraction], ...] = (
    ((1, 2, 1), Q(1, 18)), ((1, 2, 3), Q(1, 9)), ((1, 3, 1), Q(1, 18)), ((1, 3, 2), Q(1, 9)),
    ((2, 1, 2), Q(1, 18)), ((2, 1, 3), Q(1, 9)), ((2, 3, 1), Q(1, 9)), ((2, 3, 2), Q(1, 18)),
    ((3, 1, 2), Q(1, 9)), ((3, 1, 3), Q(1, 18)), ((3, 2, 1), Q(1, 9)), ((3, 2, 3), Q(1, 18)),
)


@dataclass
class SeriesJoinCheck:
    total: Fraction
    x1x2: Dict[Tuple[int, int], Fraction]
    x2y2: Dict[Tuple[int, int], Fraction]
    x1y2: Dict[Tuple[int, int], Fraction]

    @property
    def ok(self) -> bool:
        proper = [(a, b) for a in (1, 2, 3) for b in (1, 2, 3) if a != b]
        every = [(a, b) for a in (1, 2, 3) for b in (1, 2, 3)]
        return (self.total == 1
                and all(self.x1x2.get(p, 0) == Q(1, 6) for p in proper)
                and all(self.x2y2.get(p, 0) == Q(1, 6) for p in proper)
                and all(self.x1y2.get(p, 0) == Q(1, 9) for p in every)
                and set(self.x1x2) <= set(proper) and set(self.x2y2) <= set(proper))


def series_join_marginals(table=SERIES_JOIN_TABLE) -> SeriesJoinCheck:
    m12: Dict[Tuple[int, int], Fraction] = {}
    m23: Dict[Tuple[int, int], Fraction] = {}
    m13: Dict[Tuple[int, int], Fraction] = {}
    total = Q(0)
    for (a, b, c), w in table:
        total += w
        m12[(a, b)] = m12.get((a, b), Q(0)) + w
        m23[(b, c)] = m23.get((b, c), Q(0)) + w
        m13[(a, c)] = m13.get((a, c), Q(0)) + w
    return SeriesJoinCheck(total, m12, m23, m13)


def verify_series_join_table() -> bool:
    """Weights sum to 1; proper pairs on (x1, x2) and (x2, y2) each get 1/6;
    every pair on (x1, y2) gets 1/9."""
    return series_join_marginals().ok
