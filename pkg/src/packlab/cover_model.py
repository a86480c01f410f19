"""Correspondence covers: lists, per-edge matchings, list covers, untwisting,
restriction and enumeration of full covers up to list relabelling.

Each list L(v) is ``range(sizes[v])``.  An edge ``(u, v)`` with ``u < v``
stores its matching as a tuple ``t`` of length ``sizes[u]`` where ``t[i]`` is
the index in L(v) matched to ``i`` in L(u), or ``-1``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Dict, Hashable, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

from .graph_core import Edge, Graph, GraphError, _norm
from .perms import Perm, all_perms, class_representatives, compose, inverse, is_derangement_of, is_permutation

UNMATCHED = -1


class CoverError(ValueError):
    pass


class Cover:
    """A correspondence cover of ``graph`` (immutable by convention)."""

    __slots__ = ("graph", "sizes", "maps", "labels", "_rev")

    def __init__(
        self,
        graph: Graph,
        sizes: Sequence[int],
        maps: Mapping[Edge, Sequence[int]] | None = None,
        labels: Optional[Sequence[Sequence[Hashable]]] = None,
    ):
        sizes = tuple(int(s) for s in sizes)
        if len(sizes) != graph.n:
            raise CoverError("one list size per vertex required")
        if any(s < 1 for s in sizes):
            raise CoverError("lists must be nonempty")
        norm: Dict[Edge, Tuple[int, ...]] = {}
        for e in graph.edges:
            norm[e] = tuple([UNMATCHED] * sizes[e[0]])
        for (a, b), t in (maps or {}).items():
            u, v = _norm(a, b)
            if (u, v) not in norm:
                raise CoverError(f"matching on non-edge {(a, b)}")
            if (a, b) != (u, v):
                t = _invert_partial(t, sizes[u])
            t = tuple(int(x) for x in t)
            if len(t) != sizes[u]:
                raise CoverError(f"matching on {(u, v)} has wrong length")
            used = [x for x in t if x != UNMATCHED]
            if len(set(used)) != len(used) or any(not 0 <= x < sizes[v] for x in used):
                raise CoverError(f"matching on {(u, v)} is not a partial injection")
            norm[(u, v)] = t
        if labels is not None:
            labels = tuple(tuple(x) for x in labels)
            if [len(x) for x in labels] != list(sizes):
                raise CoverError("labels must match list sizes")
        self.graph = graph
        self.sizes = sizes
        self.maps = norm
        self.labels = labels
        self._rev: Dict[Edge, Tuple[int, ...]] = {}

    # -- basic queries -----------------------------------------------------
    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def k(self) -> Optional[int]:
        """Common list size, or None for mixed sizes."""
        return self.sizes[0] if self.sizes and len(set(self.sizes)) == 1 else None

    def map(self, u: int, v: int) -> Tuple[int, ...]:
        """Index map L(u) -> L(v) (entries -1 where unmatched)."""
        if u < v:
            return self.maps[(u, v)]
        key = (v, u)
        if key not in self._rev:
            self._rev[key] = _invert_partial(self.maps[key], self.sizes[u])
        return self._rev[key]

    def pairs(self, u: int, v: int) -> List[Tuple[int, int]]:
        return [(i, j) for i, j in enumerate(self.map(u, v)) if j != UNMATCHED]

    def is_full_edge(self, u: int, v: int) -> bool:
        return self.sizes[u] == self.sizes[v] and UNMATCHED not in self.map(u, v)

    def is_full(self) -> bool:
        return all(self.is_full_edge(u, v) for u, v in self.graph.edges)

    def matching_size(self, u: int, v: int) -> int:
        return len(self.pairs(u, v))

    def cover_graph(self) -> Tuple[List[Tuple[int, int]], List[Tuple[int, int]]]:
        """Nodes (v, i) and edges of H: list cliques plus matching edges."""
        nodes = [(v, i) for v in range(self.n) for i in range(self.sizes[v])]
        idx = {x: t for t, x in enumerate(nodes)}
        es = []
        for v in range(self.n):
            for i in range(self.sizes[v]):
                for j in range(i + 1, self.sizes[v]):
                    es.append((idx[(v, i)], idx[(v, j)]))
        for u, v in self.graph.edges:
            for i, j in self.pairs(u, v):
                es.append((idx[(u, i)], idx[(v, j)]))
        return nodes, es

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Cover)
            and self.graph == other.graph
            and self.sizes == other.sizes
            and self.maps == other.maps
            and self.labels == other.labels
        )

    def __hash__(self) -> int:
        return hash((self.graph.n, self.graph.edges, self.sizes, tuple(sorted(self.maps.items()))))

    def __repr__(self) -> str:
        return f"Cover(n={self.n}, sizes={self.sizes}, maps={self.maps})"

    def key(self) -> Tuple:
        return (self.graph.edges, self.sizes, tuple(self.maps[e] for e in self.graph.edges))

    # -- derived covers ----------------------------------------------------
    def relabel(self, rel: Sequence[Sequence[int]]) -> "Cover":
        """Apply per-vertex relabellings; ``rel[v][i]`` is the new index of old ``i``."""
        maps = {}
        for (u, v), t in self.maps.items():
            nt = [UNMATCHED] * self.sizes[u]
            for i, j in enumerate(t):
                if j != UNMATCHED:
                    nt[rel[u][i]] = rel[v][j]
            maps[(u, v)] = tuple(nt)
        labels = None
        if self.labels is not None:
            labels = []
            for v, lab in enumerate(self.labels):
                new = [None] * len(lab)
                for i, x in enumerate(lab):
                    new[rel[v][i]] = x
                labels.append(new)
        return Cover(self.graph, self.sizes, maps, labels)

    def without_labels(self) -> "Cover":
        return Cover(self.graph, self.sizes, self.maps)

    def with_matching(self, u: int, v: int, t: Sequence[int]) -> "Cover":
        maps = dict(self.maps)
        a, b = _norm(u, v)
        maps[(a, b)] = tuple(t) if (u, v) == (a, b) else _invert_partial(t, self.sizes[v])
        return Cover(self.graph, self.sizes, maps)

    def drop_pair(self, u: int, v: int, i: int) -> "Cover":
        """Remove the matching edge at index i of L(u) on uv."""
        t = list(self.map(u, v))
        t[i] = UNMATCHED
        return self.with_matching(u, v, t)

    def add_colors(self, v: int, added: int) -> "Cover":
        """Enlarge L(v) by ``added`` unmatched colours."""
        sizes = list(self.sizes)
        sizes[v] += added
        maps = {}
        for (a, b), t in self.maps.items():
            maps[(a, b)] = tuple(t) + (UNMATCHED,) * added if a == v else t
        return Cover(self.graph, sizes, maps)

    def edge_perm(self, u: int, v: int) -> Perm:
        if not self.is_full_edge(u, v):
            raise CoverError(f"edge {(u, v)} is not full")
        return self.map(u, v)


def _invert_partial(t: Sequence[int], target_size: int) -> Tuple[int, ...]:
    inv = [UNMATCHED] * target_size
    for i, j in enumerate(t):
        if j != UNMATCHED:
            if not 0 <= j < target_size:
                raise CoverError("matching index out of range")
            inv[j] = i
    return tuple(inv)


# ---------------------------------------------------------------------------
# compatibility


def compatible(c: Cover, u: int, cu: Sequence[int], v: int, cv: Sequence[int]) -> bool:
    """No coordinate i has (c_i(u), c_i(v)) matched on uv."""
    t = c.map(u, v)
    return all(t[a] != b for a, b in zip(cu, cv))


def compatible_via_derangement(c: Cover, u: int, cu: Sequence[int], v: int, cv: Sequence[int]) -> bool:
    """Second formulation: complete the matching on uv to a bijection s with a
    fresh value for unmatched colours; then s o c(u) must derange c(v)."""
    t = c.map(u, v)
    fresh = max(c.sizes) + 1
    composed = [t[a] if t[a] != UNMATCHED else fresh for a in cu]
    return is_derangement_of(composed, cv)


def is_transversal(c: Cover, choice: Sequence[int]) -> bool:
    if len(choice) != c.n or any(not 0 <= x < s for x, s in zip(choice, c.sizes)):
        return False
    return all(c.maps[(u, v)][choice[u]] != choice[v] for u, v in c.graph.edges)


def check_partial_packing(c: Cover, assigned: Mapping[int, Sequence[int]]) -> bool:
    for v, p in assigned.items():
        if not is_permutation(p, c.sizes[v]):
            return False
    for u, v in c.graph.edges:
        if u in assigned and v in assigned and not compatible(c, u, assigned[u], v, assigned[v]):
            return False
    return True


# ---------------------------------------------------------------------------
# constructors


def list_cover(g: Graph, lists: Sequence[Iterable[Hashable]]) -> Cover:
    """Cover induced by a list assignment: equal colours are matched."""
    labs = []
    for v, L in enumerate(lists):
        lab = sorted(L) if isinstance(L, (set, frozenset)) else list(L)
        if not lab:
            raise CoverError(f"empty list at vertex {v}")
        if len(set(lab)) != len(lab):
            raise CoverError(f"repeated colour in list of vertex {v}")
        labs.append(lab)
    if len(labs) != g.n:
        raise CoverError("one list per vertex required")
    maps = {}
    for u, v in g.edges:
        pos = {x: j for j, x in enumerate(labs[v])}
        maps[(u, v)] = tuple(pos.get(x, UNMATCHED) for x in labs[u])
    return Cover(g, [len(x) for x in labs], maps, labs)


def full_identity_cover(g: Graph, k: int) -> Cover:
    if k < 1:
        raise CoverError("k must be positive")
    return Cover(g, [k] * g.n, {e: tuple(range(k)) for e in g.edges})


def full_cover(g: Graph, k: int, perms: Mapping[Edge, Sequence[int]]) -> Cover:
    """Full k-fold cover; edges missing from ``perms`` carry the identity."""
    maps = {e: tuple(range(k)) for e in g.edges}
    for e, p in perms.items():
        maps[_norm(*e)] = tuple(p) if e[0] < e[1] else inverse(p)
    return Cover(g, [k] * g.n, maps)


def _check_forest(g: Graph, forest: Iterable[Sequence[int]]) -> List[Edge]:
    es = sorted({_norm(*e) for e in forest})
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in es:
        if not g.has_edge(u, v):
            raise GraphError(f"{(u, v)} is not an edge")
        ru, rv = find(u), find(v)
        if ru == rv:
            raise GraphError("forest contains a cycle")
        parent[ru] = rv
    return es


def untwist(c: Cover, forest: Iterable[Sequence[int]]) -> Tuple[Cover, List[Perm]]:
    """Relabel lists so that every forest edge carries the identity.

    Returns the new cover and the relabelling (old index -> new index per vertex).
    """
    es = _check_forest(c.graph, forest)
    for u, v in es:
        if not c.is_full_edge(u, v):
            raise CoverError(f"forest edge {(u, v)} is not full")
    tree_adj: Dict[int, List[int]] = {v: [] for v in range(c.n)}
    for u, v in es:
        tree_adj[u].append(v)
        tree_adj[v].append(u)
    rel: List[Optional[List[int]]] = [None] * c.n
    for root in range(c.n):
        if rel[root] is not None:
            continue
        rel[root] = list(range(c.sizes[root]))
        stack = [root]
        while stack:
            u = stack.pop()
            for w in sorted(tree_adj[u]):
                if rel[w] is None:
                    s = c.map(u, w)
                    r = [0] * c.sizes[w]
                    for i in range(c.sizes[u]):
                        r[s[i]] = rel[u][i]
                    rel[w] = r
                    stack.append(w)
    relt = [tuple(r) for r in rel]  # type: ignore[arg-type]
    return c.relabel(relt), relt


def restrict(c: Cover, sub: Graph, vertices: Optional[Sequence[int]] = None) -> Cover:
    """Restriction to a subgraph; sub vertex i is base vertex ``vertices[i]`` (default i)."""
    vs = list(range(sub.n)) if vertices is None else list(vertices)
    if len(vs) != sub.n or len(set(vs)) != len(vs) or any(not 0 <= x < c.n for x in vs):
        raise GraphError("bad vertex correspondence")
    maps = {}
    for a, b in sub.edges:
        u, v = vs[a], vs[b]
        if not c.graph.has_edge(u, v):
            raise GraphError(f"{(a, b)} is not an edge of the base graph")
        maps[(a, b)] = c.map(u, v)
    labels = None if c.labels is None else [c.labels[x] for x in vs]
    return Cover(sub, [c.sizes[x] for x in vs], maps, labels)


# ---------------------------------------------------------------------------
# enumeration of full covers


@dataclass
class FullCoverSpace:
    """Full k-fold covers that are the identity on a forest, indexed 0..size-1.

    The first non-forest edge ranges over conjugacy-class representatives of
    S_k; the remaining ones over all k! permutations (lexicographic), with the
    last edge varying fastest.
    """

    graph: Graph
    k: int
    forest: List[Edge]
    free_edges: List[Edge]

    @classmethod
    def build(cls, g: Graph, k: int, spanning_forest: Optional[Iterable[Sequence[int]]] = None) -> "FullCoverSpace":
        forest = _check_forest(g, g.spanning_forest() if spanning_forest is None else spanning_forest)
        free = [e for e in g.edges if e not in set(forest)]
        return cls(g, k, forest, free)

    @property
    def radices(self) -> List[int]:
        if not self.free_edges:
            return []
        f = len(all_perms(self.k))
        return [len(class_representatives(self.k))] + [f] * (len(self.free_edges) - 1)

    @property
    def size(self) -> int:
        out = 1
        for r in self.radices:
            out *= r
        return out

    def digits(self, index: int) -> List[int]:
        ds = []
        for r in reversed(self.radices):
            ds.append(index % r)
            index //= r
        return ds[::-1]

    def perms_at(self, index: int) -> List[Perm]:
        ps = all_perms(self.k)
        reps = class_representatives(self.k)
        ds = self.digits(index)
        return [reps[d] if t == 0 else ps[d] for t, d in enumerate(ds)]

    def cover(self, index: int) -> Cover:
        if not 0 <= index < self.size:
            raise IndexError(index)
        return full_cover(self.graph, self.k, dict(zip(self.free_edges, self.perms_at(index))))

    def __iter__(self) -> Iterator[Cover]:
        return (self.cover(i) for i in range(self.size))


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, resume: int = 0):
        super().__init__(message)
        self.resume = resume


def enumerate_full_covers(
    g: Graph,
    k: int,
    spanning_forest: Optional[Iterable[Sequence[int]]] = None,
    start: int = 0,
    budget: Optional[int] = None,
) -> Iterator[Cover]:
    """Yield full k-fold covers, identity on the forest, one per reduced index.

    Raises BudgetExceeded (with the resume index) after ``budget`` covers.
    """
    space = FullCoverSpace.build(g, k, spanning_forest)
    for i in range(start, space.size):
        if budget is not None and i - start >= budget:
            raise BudgetExceeded(f"stopped after {budget} covers", resume=i)
        yield space.cover(i)


def canonical_full_cover_key(c: Cover, forest: Sequence[Edge], automorphisms: Sequence[Sequence[int]] = ()) -> Tuple:
    """Canonical key of a full cover under list relabellings and, optionally,
    base-graph automorphisms: untwist on the forest (after moving the cover
    by each automorphism) and minimise over simultaneous conjugation."""
    k = c.k
    assert k is not None and c.is_full()
    g = c.graph
    free = [e for e in g.edges if e not in set(forest)]
    autos = list(automorphisms) or [tuple(range(g.n))]
    best = None
    for phi in autos:
        # moved cover: vertex phi[v] gets v's list
        maps = {}
        for u, v in g.edges:
            a, b = phi[u], phi[v]
            maps[(a, b)] = c.map(u, v)
        moved = Cover(g, c.sizes, maps)
        flat, _ = untwist(moved, forest)
        seq = [flat.map(u, v) for u, v in free]
        for pi in all_perms(k):
            key = tuple(compose(pi, compose(s, inverse(pi))) for s in seq)
            if best is None or key < best:
                best = key
    return best


# ---------------------------------------------------------------------------
# JSON


def cover_to_json(c: Cover) -> str:
    lists: List = list(c.sizes) if c.labels is None else [list(x) for x in c.labels]
    matchings = [{"edge": [u, v], "map": [[i, j] for i, j in c.pairs(u, v)]} for u, v in c.graph.edges]
    doc = {"graph": {"n": c.n, "edges": [list(e) for e in c.graph.edges]}, "lists": lists, "matchings": matchings}
    return json.dumps(doc)


def cover_from_json(text: str | dict) -> Cover:
    doc = json.loads(text) if isinstance(text, str) else text
    g = Graph(doc["graph"]["n"], doc["graph"]["edges"])
    lists = doc["lists"]
    labels = None
    if lists and isinstance(lists[0], list):
        labels = lists
        sizes = [len(x) for x in lists]
    else:
        sizes = [int(x) for x in lists]
    maps = {}
    for m in doc.get("matchings", []):
        u, v = m["edge"]
        t = [UNMATCHED] * sizes[u]
        for i, j in m["map"]:
            if t[i] != UNMATCHED:
                raise CoverError("matching is not injective")
            t[i] = j
        maps[(u, v)] = t
    return Cover(g, sizes, maps, labels)


def transversal_count_product_bound(c: Cover) -> int:
    out = 1
    for s in c.sizes:
        out *= s
    return out


def all_choices(c: Cover) -> Iterator[Tuple[int, ...]]:
    return product(*(range(s) for s in c.sizes))
