"""Packings of covers: search, transversal counting, extension of partial
packings and exhaustive packing-number verdicts for tiny graphs."""
from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import _kernels
from .cover_model import (
    UNMATCHED,
    BudgetExceeded,
    Cover,
    CoverError,
    FullCoverSpace,
    check_partial_packing,
    compatible,
    full_cover,
    is_transversal,
    list_cover,
)
from .graph_core import Graph, degeneracy
from .perms import Perm, all_perms, class_representatives, compose, derangement_masks, inverse, perm_index

HOLDS = "HOLDS"
FAILS = "FAILS"
INCONCLUSIVE = "INCONCLUSIVE"


def env_budget(default: Optional[int] = None) -> Optional[int]:
    """Node budget, overridable through PACKLAB_BUDGET."""
    raw = os.environ.get("PACKLAB_BUDGET")
    if raw:
        return int(float(raw))
    return default


@dataclass(frozen=True)
class Packing:
    """columns[v] is the permutation c(v): coloring i uses list index columns[v][i]."""

    columns: Tuple[Perm, ...]

    @property
    def k(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    def rows(self) -> List[Tuple[int, ...]]:
        return [tuple(col[i] for col in self.columns) for i in range(self.k)]

    def is_valid(self, c: Cover) -> bool:
        """Independent re-check: every row is an independent transversal and
        every column a permutation of its list."""
        if len(self.columns) != c.n:
            return False
        if any(sorted(col) != list(range(c.sizes[v])) for v, col in enumerate(self.columns)):
            return False
        return all(is_transversal(c, row) for row in self.rows())


def search_order(g: Graph) -> List[int]:
    """Reverse degeneracy order: the last vertex removed comes first."""
    _, order = degeneracy(g)
    return order[::-1]


# ---------------------------------------------------------------------------
# transversals


def iter_transversals(c: Cover, order: Optional[Sequence[int]] = None) -> Iterator[Tuple[int, ...]]:
    """All independent transversals, lexicographic in vertex order 0..n-1."""
    n = c.n
    order = list(range(n)) if order is None else list(order)
    pos = {v: t for t, v in enumerate(order)}
    back = [[(w, c.map(w, v)) for w in c.graph.neighbors(v) if pos[w] < pos[v]] for v in order]
    choice = [0] * n

    def rec(t: int):
        if t == n:
            yield tuple(choice)
            return
        v = order[t]
        banned = {m[choice[w]] for w, m in back[t]}
        for i in range(c.sizes[v]):
            if i not in banned:
                choice[v] = i
                yield from rec(t + 1)

    yield from rec(0)


def count_transversals(c: Cover) -> int:
    """Number of independent transversals (backtracking with pruning)."""
    order = search_order(c.graph)
    pos = {v: t for t, v in enumerate(order)}
    back = [[(w, c.map(w, v)) for w in c.graph.neighbors(v) if pos[w] < pos[v]] for v in order]
    choice = [0] * c.n
    sizes = [c.sizes[v] for v in order]

    def rec(t: int) -> int:
        if t == len(order):
            return 1
        v = order[t]
        banned = {m[choice[w]] for w, m in back[t]}
        total = 0
        for i in range(sizes[t]):
            if i not in banned:
                choice[v] = i
                total += rec(t + 1)
        return total

    return rec(0)


# ---------------------------------------------------------------------------
# packing search with arc consistency


@lru_cache(maxsize=None)
def _position_masks(k: int) -> Tuple[Tuple[int, ...], ...]:
    """pos[i][x]: bitmask of perms q with q[i] == x."""
    ps = all_perms(k)
    out = [[0] * k for _ in range(k)]
    for qi, q in enumerate(ps):
        for i in range(k):
            out[i][q[i]] |= 1 << qi
    return tuple(tuple(r) for r in out)


@lru_cache(maxsize=4096)
def compat_table(t: Tuple[int, ...], k: int) -> Tuple[int, ...]:
    """table[p] = bitmask of q such that t[p_i] != q_i for all i."""
    ps = all_perms(k)
    pos = _position_masks(k)
    full = (1 << len(ps)) - 1
    out = []
    for p in ps:
        m = full
        for i in range(k):
            x = t[p[i]]
            if x != UNMATCHED:
                m &= ~pos[i][x]
        out.append(m)
    return tuple(out)


def _bits(m: int) -> Iterator[int]:
    while m:
        low = m & -m
        yield low.bit_length() - 1
        m ^= low


class PackingSearch:
    """Depth-first search for a packing, maintaining arc consistency.

    Domains are bitmasks over the k! permutations (lexicographic indices).
    The search is deterministic: the next vertex minimises domain size over
    degree (ties broken by reverse-degeneracy order), candidates are tried
    lexicographically.
    """

    def __init__(
        self,
        c: Cover,
        budget: Optional[int] = None,
        fixed: Optional[Mapping[int, Sequence[int]]] = None,
        active: Optional[Sequence[int]] = None,
        break_symmetry: bool = True,
    ):
        k = c.k
        if k is None:
            raise CoverError("packing search needs equal list sizes")
        self.c = c
        self.k = k
        self.budget = budget
        self.nodes = 0
        self.perms = all_perms(k)
        idx = perm_index(k)
        vs = list(range(c.n)) if active is None else sorted(active)
        self.active = vs
        act = set(vs)
        sub_order = [v for v in search_order(c.graph) if v in act]
        self.order = sub_order
        self.nbrs: Dict[int, List[int]] = {v: [] for v in vs}
        self.tab: Dict[Tuple[int, int], Tuple[int, ...]] = {}
        for u, v in c.graph.edges:
            if u in act and v in act:
                self.nbrs[u].append(v)
                self.nbrs[v].append(u)
                self.tab[(u, v)] = compat_table(c.map(u, v), k)
                self.tab[(v, u)] = compat_table(c.map(v, u), k)
        full = (1 << len(self.perms)) - 1
        dom = {v: full for v in vs}
        fixed = dict(fixed or {})
        for v, p in fixed.items():
            dom[v] = 1 << idx[tuple(p)]
        if break_symmetry and not fixed and sub_order:
            dom[sub_order[0]] = 1  # identity; reorder rows of any packing
        self.initial = dom

    def _revise(self, dom: Dict[int, int], queue: List[int]) -> bool:
        """AC-3: drop values of x with no support in a changed neighbour y."""
        inq = set(queue)
        while queue:
            y = queue.pop()
            inq.discard(y)
            dy = dom[y]
            for x in self.nbrs[y]:
                dx = dom[x]
                tab = self.tab[(x, y)]
                keep = 0
                for p in _bits(dx):
                    if tab[p] & dy:
                        keep |= 1 << p
                if keep != dx:
                    if not keep:
                        return False
                    dom[x] = keep
                    if x not in inq:
                        queue.append(x)
                        inq.add(x)
        return True

    def solve(self) -> Optional[Packing]:
        dom = dict(self.initial)
        if not self._revise(dom, list(self.active)):
            return None
        res = self._dfs(dom, 0)
        if res is None:
            return None
        return Packing(tuple(self.perms[res[v]] if v in res else () for v in range(self.c.n)))

    def _pick(self, dom: Dict[int, int]) -> int:
        """Unassigned vertex minimising |domain| / degree (ties: static order)."""
        best, best_key = -1, None
        for t, v in enumerate(self.order):
            d = dom[v]
            if d & (d - 1) == 0:
                continue
            key = (bin(d).count("1") * 64 // max(1, len(self.nbrs[v])), t)
            if best_key is None or key < best_key:
                best, best_key = v, key
        return best

    def _dfs(self, dom: Dict[int, int], t: int) -> Optional[Dict[int, int]]:
        v = self._pick(dom)
        if v < 0:
            return {u: dom[u].bit_length() - 1 for u in self.active}
        for p in _bits(dom[v]):
            self.nodes += 1
            if self.budget is not None and self.nodes > self.budget:
                raise BudgetExceeded(f"node budget {self.budget} exhausted")
            nd = dict(dom)
            nd[v] = 1 << p
            if self._revise(nd, [v]):
                res = self._dfs(nd, t + 1)
                if res is not None:
                    return res
        return None


def find_packing(c: Cover, budget: Optional[int] = None) -> Optional[Packing]:
    """A packing of a k-fold cover, or None after exhausting the search.

    Raises BudgetExceeded when the node budget runs out (never returns None
    in that case)."""
    return PackingSearch(c, budget=budget).solve()


def find_packing_bruteforce(c: Cover) -> Optional[Packing]:
    """Plain backtracking over columns in vertex order 0..n-1, no propagation."""
    k = c.k
    if k is None:
        raise CoverError("packing search needs equal list sizes")
    ps = all_perms(k)
    cols: List[Perm] = []

    def rec(v: int) -> bool:
        if v == c.n:
            return True
        for p in ps:
            if all(compatible(c, w, cols[w], v, p) for w in c.graph.neighbors(v) if w < v):
                cols.append(p)
                if rec(v + 1):
                    return True
                cols.pop()
        return False

    return Packing(tuple(cols)) if rec(0) else None


def extendable(
    c: Cover,
    partial: Mapping[int, Sequence[int]],
    frontier: Sequence[int],
    budget: Optional[int] = None,
) -> bool:
    """Can the partial packing be completed on ``frontier``?  Only edges inside
    dom(partial) | frontier matter."""
    if not check_partial_packing(c, partial):
        raise CoverError("partial packing violates compatibility")
    active = sorted(set(partial) | set(frontier))
    if set(partial) & set(frontier):
        raise CoverError("frontier overlaps the assigned vertices")
    if len({c.sizes[v] for v in active}) > 1:
        raise CoverError("packing search needs equal list sizes")
    sub_sizes = [c.sizes[active[0]]] * c.n
    # widen unrelated vertices to the same size so the search object accepts the cover
    maps = {}
    for (u, v), t in c.maps.items():
        if u in active and v in active:
            maps[(u, v)] = t
    sub = Cover(Graph(c.n, [e for e in c.graph.edges if e[0] in active and e[1] in active]), sub_sizes, maps)
    s = PackingSearch(sub, budget=budget, fixed=partial, active=active, break_symmetry=False)
    return s.solve() is not None


# ---------------------------------------------------------------------------
# compiled scans over FullCoverSpace


@lru_cache(maxsize=None)
def _perm_tables(k: int):
    ps = all_perms(k)
    idx = perm_index(k)
    comp = np.array([[idx[compose(a, b)] for b in ps] for a in ps], dtype=np.int64)
    inv = np.array([idx[inverse(a)] for a in ps], dtype=np.int64)
    der = np.array(derangement_masks(k), dtype=np.uint64)
    return comp, inv, der


class CompiledSpace:
    """Array form of a FullCoverSpace for the compiled scanner (k! <= 64)."""

    def __init__(self, space: FullCoverSpace):
        g, k = space.graph, space.k
        if len(all_perms(k)) > 64:
            raise ValueError("compiled scan supports k <= 4")
        self.space = space
        order = search_order(g)
        pos = {v: t for t, v in enumerate(order)}
        eid = {e: i for i, e in enumerate(g.edges)}
        maxdeg = max(1, g.max_degree())
        n = g.n
        self.nnb = np.zeros(n, dtype=np.int64)
        self.nbr = np.zeros((n, maxdeg), dtype=np.int64)
        self.nbr_edge = np.zeros((n, maxdeg), dtype=np.int64)
        self.nbr_flip = np.zeros((n, maxdeg), dtype=np.bool_)
        for t, v in enumerate(order):
            j = 0
            for w in sorted(g.adj[v], key=lambda x: pos[x]):
                if pos[w] < t:
                    u1, v1 = min(v, w), max(v, w)
                    self.nbr[t, j] = pos[w]
                    self.nbr_edge[t, j] = eid[(u1, v1)]
                    # edge stored as L(u1)->L(v1); seen from w that is the map
                    # itself when w == u1, else its inverse
                    self.nbr_flip[t, j] = w != u1
                    j += 1
            self.nnb[t] = j
        self.base = np.zeros(len(g.edges), dtype=np.int64)  # identity everywhere
        self.free = np.array([eid[e] for e in space.free_edges], dtype=np.int64)
        idx = perm_index(k)
        self.reps = np.array([idx[r] for r in class_representatives(k)], dtype=np.int64)
        self.radices = np.array(space.radices, dtype=np.int64)
        self.comp, self.inv, self.der = _perm_tables(k)

    def scan(self, start: int, stop: int, max_fail: int = 100000):
        if self.free.shape[0] == 0:
            # a single cover; the scanner needs at least one digit
            counter = np.zeros(1, dtype=np.int64)
            ok = _kernels.full_cover_has_packing(
                self.space.graph.n, self.nnb, self.nbr, self.nbr_edge, self.nbr_flip,
                self.base, self.comp, self.inv, self.der, counter,
            )
            fails = np.array([] if ok else [0], dtype=np.int64)
            return fails, len(fails), int(counter[0])
        fails, nfail, nodes = _kernels.scan_full_covers(
            self.space.graph.n, self.nnb, self.nbr, self.nbr_edge, self.nbr_flip, self.base,
            self.free, self.reps, self.radices, start, stop, self.comp, self.inv, self.der, max_fail,
        )
        return fails, int(nfail), int(nodes)


def _scan_shard(args):
    g_n, g_edges, k, forest, start, stop = args
    space = FullCoverSpace.build(Graph(g_n, g_edges), k, forest)
    return CompiledSpace(space).scan(start, stop)


@dataclass
class Verdict:
    status: str
    witness: Optional[Cover] = None
    covers_checked: int = 0
    nodes_expanded: int = 0
    elapsed: float = 0.0
    resume: Optional[int] = None
    failures: List[int] = field(default_factory=list)
    total_failures: int = 0

    def to_json(self) -> Dict:
        from .cover_model import cover_to_json

        out = {
            "verdict": self.status,
            "nodes_expanded": self.nodes_expanded,
            "covers_checked": self.covers_checked,
            "elapsed": round(self.elapsed, 3),
        }
        if self.witness is not None:
            out["witness"] = json.loads(cover_to_json(self.witness))
        if self.resume is not None:
            out["resume"] = self.resume
        return out


CHUNK = 10**6


def scan_space(
    space: FullCoverSpace,
    start: int = 0,
    stop: Optional[int] = None,
    budget: Optional[int] = None,
    state_path: Optional[str] = None,
    jobs: int = 1,
    compiled: Optional[bool] = None,
    stop_at_first: bool = False,
) -> Verdict:
    """Check every cover with index in [start, stop); collect packing-free ones.

    Works in chunks of 10^6 covers, writing ``state_path`` after each chunk so
    a later call can resume.  ``budget`` caps expanded search nodes; it is
    checked between chunks.
    """
    t0 = time.time()
    stop = space.size if stop is None else stop
    fails: List[int] = []
    total_fail = 0
    nodes = 0
    if state_path and os.path.exists(state_path):
        with open(state_path) as fh:
            st = json.load(fh)
        start, fails, total_fail, nodes = st["next"], st["failures"], st["total_failures"], st["nodes"]
    if compiled is None:
        compiled = len(all_perms(space.k)) <= 64
    cs = CompiledSpace(space) if compiled else None
    pos = start
    chunk = CHUNK if compiled else 10**4
    while pos < stop:
        if budget is not None and nodes >= budget:
            return Verdict(INCONCLUSIVE, None, pos, nodes, time.time() - t0, resume=pos,
                           failures=fails, total_failures=total_fail)
        hi = min(stop, pos + chunk * max(1, jobs))
        if cs is not None and jobs > 1:
            from concurrent.futures import ProcessPoolExecutor

            bounds = np.linspace(pos, hi, jobs + 1).astype(int)
            args = [(space.graph.n, space.graph.edges, space.k, space.forest, int(a), int(b))
                    for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
            with ProcessPoolExecutor(max_workers=jobs) as ex:
                for f, nf, nd in ex.map(_scan_shard, args):
                    fails.extend(int(x) for x in f)
                    total_fail += nf
                    nodes += nd
        elif cs is not None:
            f, nf, nd = cs.scan(pos, hi)
            fails.extend(int(x) for x in f)
            total_fail += nf
            nodes += nd
        else:
            for i in range(pos, hi):
                s = PackingSearch(space.cover(i))
                if s.solve() is None:
                    fails.append(i)
                    total_fail += 1
                nodes += s.nodes
                if stop_at_first and fails:
                    hi = i + 1
                    break
        pos = hi
        if state_path:
            with open(state_path, "w") as fh:
                json.dump({"next": pos, "failures": fails, "total_failures": total_fail, "nodes": nodes}, fh)
        if stop_at_first and fails:
            break
    elapsed = time.time() - t0
    if fails:
        return Verdict(FAILS, space.cover(fails[0]), pos - start, nodes, elapsed,
                       failures=fails, total_failures=total_fail)
    return Verdict(HOLDS, None, pos - start, nodes, elapsed)


def corr_packing_upper(
    g: Graph,
    k: int,
    budget: Optional[int] = None,
    start: int = 0,
    state_path: Optional[str] = None,
    jobs: int = 1,
) -> Verdict:
    """Does every k-fold correspondence cover of g have a packing?

    Non-full covers need not be enumerated: adding matching edges only removes
    options, so a packing-free cover extends to a packing-free full cover.
    """
    budget = env_budget(budget)
    space = FullCoverSpace.build(g, k)
    v = scan_space(space, start=start, budget=budget, state_path=state_path, jobs=jobs, stop_at_first=True)
    if v.witness is not None:
        # replay the witness with the independent search
        assert find_packing(v.witness) is None
    return v


# ---------------------------------------------------------------------------
# list packings


def _list_systems(g: Graph, k: int, order: Sequence[int]) -> Iterator[List[Tuple[int, ...]]]:
    """k-fold list assignments of g, one per list cover up to colour renaming.

    A list cover only sees which colours two adjacent lists share, so a colour
    whose vertex set is disconnected can be split into one colour per
    component.  Colours are therefore generated as connected classes: a vertex
    either takes a fresh colour or joins classes that already meet one of its
    neighbours (several at once when their vertex sets are disjoint).
    """
    nbrs = [set(g.neighbors(v)) for v in range(g.n)]
    lists: List[Tuple[int, ...]] = [()] * g.n
    members: List[set] = []  # colour -> vertex set
    alias: List[int] = []  # merged colours point at the survivor

    def find(c: int) -> int:
        while alias[c] != c:
            c = alias[c]
        return c

    def groups(cands: List[int]) -> List[Tuple[int, ...]]:
        out = []
        for r in range(1, len(cands) + 1):
            for sub in combinations(cands, r):
                seen: set = set()
                for c in sub:
                    if seen & members[c]:
                        break
                    seen |= members[c]
                else:
                    out.append(sub)
        return out

    def choose(gs, start: int, picked: list, used: set):
        yield picked
        if len(picked) == k:
            return
        for i in range(start, len(gs)):
            if used.isdisjoint(gs[i]):
                yield from choose(gs, i + 1, picked + [gs[i]], used | set(gs[i]))

    def rec(t: int):
        if t == len(order):
            yield [tuple(sorted(find(c) for c in x)) for x in lists]
            return
        v = order[t]
        cands = sorted({find(c) for u in nbrs[v] for c in lists[u]})
        for picked in choose(groups(cands), 0, [], set()):
            mark = len(members)
            saved = [(c, set(members[c]), alias[c]) for grp in picked for c in grp]
            cols = []
            for grp in picked:
                root = grp[0]
                for c in grp[1:]:
                    members[root] |= members[c]
                    alias[c] = root
                members[root].add(v)
                cols.append(root)
            for _ in range(k - len(picked)):
                alias.append(len(members))
                cols.append(len(members))
                members.append({v})
            lists[v] = tuple(cols)
            yield from rec(t + 1)
            lists[v] = ()
            del members[mark:]
            del alias[mark:]
            for c, m, a in saved:
                members[c] = m
                alias[c] = a

    yield from rec(0)


def list_packing_upper(
    g: Graph,
    k: int,
    budget: Optional[int] = None,
    seed_lists: Optional[Sequence[Sequence[Sequence[int]]]] = None,
) -> Verdict:
    """Does every k-fold list cover of g have a packing?

    ``seed_lists`` are list assignments tried before the exhaustive sweep
    (useful when a candidate counterexample is known).  ``budget`` caps the
    number of list systems examined.
    """
    budget = env_budget(budget)
    t0 = time.time()
    nodes = 0
    checked = 0
    seen = set()
    candidates: List = list(seed_lists or [])
    order = search_order(g)

    def gen():
        yield from candidates
        yield from _list_systems(g, k, order)

    for lists in gen():
        key = tuple(tuple(sorted(x)) for x in lists)
        if key in seen:
            continue
        seen.add(key)
        if budget is not None and checked >= budget:
            return Verdict(INCONCLUSIVE, None, checked, nodes, time.time() - t0, resume=checked)
        checked += 1
        c = list_cover(g, [sorted(x) for x in lists])
        s = PackingSearch(c)
        found = s.solve()
        nodes += s.nodes
        if found is None:
            return Verdict(FAILS, c, checked, nodes, time.time() - t0)
    return Verdict(HOLDS, None, checked, nodes, time.time() - t0)


def random_full_cover(g: Graph, k: int, rng) -> Cover:
    ps = all_perms(k)
    return full_cover(g, k, {e: ps[rng.randrange(len(ps))] for e in g.edges})


def random_cover(g: Graph, k: int, rng, density: float = 0.7) -> Cover:
    """k-fold cover whose matchings are random partial injections."""
    maps = {}
    for e in g.edges:
        p = list(all_perms(k)[rng.randrange(len(all_perms(k)))])
        maps[e] = tuple(x if rng.random() < density else UNMATCHED for x in p)
    return Cover(g, [k] * g.n, maps)
