"""Simple undirected graphs, structural invariants and the named-graph catalog."""
from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

Edge = Tuple[int, int]
INF = float("inf")


class GraphError(ValueError):
    pass


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices 0..n-1."""

    n: int
    edges: Tuple[Edge, ...]
    adj: Tuple[FrozenSet[int], ...] = field(init=False, repr=False, compare=False)

    def __init__(self, n: int, edges: Iterable[Sequence[int]] = ()):
        if n < 0:
            raise GraphError("negative vertex count")
        seen = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"self-loop at {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge {(u, v)} out of range for n={n}")
            uv = _norm(u, v)
            if uv in seen:
                raise GraphError(f"parallel edge {uv}")
            seen.add(uv)
        adj: List[set] = [set() for _ in range(n)]
        for u, v in seen:
            adj[u].add(v)
            adj[v].add(u)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        object.__setattr__(self, "adj", tuple(frozenset(a) for a in adj))

    @property
    def m(self) -> int:
        return len(self.edges)

    def neighbors(self, v: int) -> List[int]:
        return sorted(self.adj[v])

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def min_degree(self) -> int:
        return min((len(a) for a in self.adj), default=0)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def induced(self, vertices: Iterable[int]) -> Tuple["Graph", List[int]]:
        """Induced subgraph relabelled to 0..len-1; also returns the old labels."""
        keep = sorted(set(vertices))
        pos = {v: i for i, v in enumerate(keep)}
        es = [(pos[u], pos[v]) for u, v in self.edges if u in pos and v in pos]
        return Graph(len(keep), es), keep

    def with_edges(self, extra: Iterable[Sequence[int]]) -> "Graph":
        return Graph(self.n, list(self.edges) + [tuple(e) for e in extra])

    def without_edges(self, drop: Iterable[Sequence[int]]) -> "Graph":
        gone = {_norm(*e) for e in drop}
        return Graph(self.n, [e for e in self.edges if e not in gone])

    def is_subgraph_of(self, other: "Graph") -> bool:
        return self.n <= other.n and all(other.has_edge(u, v) for u, v in self.edges)

    def components(self) -> List[List[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, queue = [], [s]
            while queue:
                x = queue.pop()
                comp.append(x)
                for y in self.adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        queue.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.n <= 1 or len(self.components()) == 1

    def spanning_forest(self) -> List[Edge]:
        """BFS forest from the smallest vertex of each component, neighbours in order."""
        seen = [False] * self.n
        out: List[Edge] = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            queue = deque([s])
            while queue:
                x = queue.popleft()
                for y in sorted(self.adj[x]):
                    if not seen[y]:
                        seen[y] = True
                        out.append(_norm(x, y))
                        queue.append(y)
        return sorted(out)

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    def automorphisms(self) -> List[Tuple[int, ...]]:
        """All automorphisms as vertex maps (fine for the small graphs used here)."""
        gm = nx.algorithms.isomorphism.GraphMatcher(self.to_networkx(), self.to_networkx())
        out = [tuple(m[v] for v in range(self.n)) for m in gm.isomorphisms_iter()]
        return sorted(out)


# ---------------------------------------------------------------------------
# invariants


def girth(g: Graph) -> float:
    """Length of a shortest cycle, or infinity for a forest."""
    best = INF
    for s in range(g.n):
        dist = {s: 0}
        parent = {s: -1}
        queue = deque([s])
        while queue:
            x = queue.popleft()
            if 2 * dist[x] + 1 >= best:
                break
            for y in g.adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
                elif parent[x] != y:
                    best = min(best, dist[x] + dist[y] + 1)
    return best


def degeneracy(g: Graph) -> Tuple[int, List[int]]:
    """Degeneracy and the min-degree removal order (ties broken by smallest index)."""
    deg = [g.degree(v) for v in range(g.n)]
    alive = [True] * g.n
    order: List[int] = []
    d = 0
    for _ in range(g.n):
        v = min((x for x in range(g.n) if alive[x]), key=lambda x: (deg[x], x))
        d = max(d, deg[v])
        alive[v] = False
        order.append(v)
        for y in g.adj[v]:
            if alive[y]:
                deg[y] -= 1
    return d, order


def _denser_than(g: Graph, p: int, q: int) -> Optional[List[int]]:
    """A vertex set S with q|E(S)| - p|S| > 0, or None (max-closure via min cut)."""
    if g.m == 0:
        return None
    net = nx.DiGraph()
    for i, (u, v) in enumerate(g.edges):
        net.add_edge("s", ("e", i), capacity=q)
        net.add_edge(("e", i), ("v", u))
        net.add_edge(("e", i), ("v", v))
    for v in range(g.n):
        net.add_edge(("v", v), "t", capacity=p)
    cut, (source_side, _) = nx.minimum_cut(net, "s", "t")
    if q * g.m - cut <= 0:
        return None
    return sorted(x[1] for x in source_side if isinstance(x, tuple) and x[0] == "v")


@dataclass
class MadResult:
    value: Fraction
    witness: List[int]

    def __iter__(self):
        return iter((self.value, self.witness))


def mad(g: Graph) -> MadResult:
    """Exact maximum average degree with a densest-subgraph witness.

    The densest ratio |E(S)|/|S| is one of the finitely many a/b with b <= n,
    so a binary search over those candidates with a max-flow oracle is exact.
    """
    if g.n == 0:
        raise GraphError("mad of the empty graph is undefined")
    if g.m == 0:
        return MadResult(Fraction(0), [0])
    cands = sorted({Fraction(a, b) for b in range(1, g.n + 1) for a in range(0, g.m + 1)})
    lo, hi = 0, len(cands) - 1  # cands[hi] is never exceeded
    while lo < hi:
        mid = (lo + hi) // 2
        c = cands[mid]
        if _denser_than(g, c.numerator, c.denominator) is None:
            hi = mid
        else:
            lo = mid + 1
    rho = cands[lo]
    below = cands[lo - 1]
    witness = _denser_than(g, below.numerator, below.denominator)
    assert witness is not None
    sub, _ = g.induced(witness)
    assert Fraction(sub.m, sub.n) == rho
    return MadResult(2 * rho, witness)


@dataclass
class PlanarityResult:
    planar: bool
    rotation: Optional[Dict[int, List[int]]] = None
    kuratowski_edges: Optional[List[Edge]] = None
    kuratowski_type: Optional[str] = None

    def __bool__(self) -> bool:
        return self.planar


def is_planar(g: Graph) -> PlanarityResult:
    """Planarity with a rotation system or a Kuratowski subdivision witness."""
    ok, cert = nx.check_planarity(g.to_networkx(), counterexample=True)
    if ok:
        return PlanarityResult(True, rotation={v: list(cert.neighbors_cw_order(v)) for v in cert.nodes})
    edges = sorted(_norm(u, v) for u, v in cert.edges)
    degs: Dict[int, int] = {}
    for u, v in edges:
        degs[u] = degs.get(u, 0) + 1
        degs[v] = degs.get(v, 0) + 1
    branch = [v for v, d in degs.items() if d >= 3]
    kind = "K5" if len(branch) == 5 and all(degs[v] == 4 for v in branch) else "K3,3"
    return PlanarityResult(False, kuratowski_edges=edges, kuratowski_type=kind)


def check_kuratowski_witness(g: Graph, res: PlanarityResult) -> bool:
    """Independent check that the witness is a K5 or K3,3 subdivision inside g."""
    if res.planar or not res.kuratowski_edges:
        return False
    if not all(g.has_edge(u, v) for u, v in res.kuratowski_edges):
        return False
    h = nx.Graph(res.kuratowski_edges)
    # suppress degree-2 vertices
    changed = True
    while changed:
        changed = False
        for v in list(h.nodes):
            if h.degree(v) == 2:
                a, b = list(h.neighbors(v))
                if h.has_edge(a, b):
                    return False
                h.remove_node(v)
                h.add_edge(a, b)
                changed = True
                break
    return nx.is_isomorphic(h, nx.complete_graph(5)) or nx.is_isomorphic(
        h, nx.complete_bipartite_graph(3, 3)
    )


@dataclass
class StructReport:
    girth: float
    degeneracy: int
    degeneracy_order: List[int]
    mad: Fraction
    mad_witness: List[int]
    planar: PlanarityResult


def structure(g: Graph) -> StructReport:
    d, order = degeneracy(g)
    m = mad(g)
    return StructReport(girth(g), d, order, m.value, m.witness, is_planar(g))


# ---------------------------------------------------------------------------
# catalog


def complete(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def complete_minus(n: int) -> Graph:
    """K_n without the edge 0-2 (labels follow the K5-minus cover generator)."""
    return complete(n).without_edges([(0, 2)])


def complete_bipartite(a: int, b: int) -> Graph:
    return Graph(a + b, [(i, a + j) for i in range(a) for j in range(b)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycles need at least 3 vertices")
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def wheel(n: int) -> Graph:
    """Wheel on n vertices: hub n-1 joined to a cycle on 0..n-2."""
    if n < 4:
        raise GraphError("wheels need at least 4 vertices")
    rim = cycle(n - 1)
    return Graph(n, list(rim.edges) + [(i, n - 1) for i in range(n - 1)])


def fan(n: int) -> Graph:
    """Fan on n vertices: apex n-1 joined to every vertex of the path 0..n-2."""
    if n < 2:
        raise GraphError("fans need at least 2 vertices")
    p = path(n - 1)
    return Graph(n, list(p.edges) + [(i, n - 1) for i in range(n - 1)])


def square_of_path(n: int) -> Graph:
    return Graph(n, [(i, j) for i in range(n) for j in (i + 1, i + 2) if j < n])


def k23_plus_edge() -> Graph:
    """K_{2,3} (sides {0,1} and {2,3,4}) plus the edge 2-3."""
    return complete_bipartite(2, 3).with_edges([(2, 3)])


def g_nrs(n: int, r: int, s: int, plus: bool = False) -> Graph:
    """Path v1..vn plus v1 v_{n-i} (1<=i<=r) and v_{i+1} v_n (1<=i<=s); 0-based labels."""
    if not (2 <= r <= s and n - 2 <= r + s <= n - 1):
        raise GraphError(f"G({n},{r},{s}) needs 2 <= r <= s and n-2 <= r+s <= n-1")
    es = [(i, i + 1) for i in range(n - 1)]
    es += [(0, n - 1 - i) for i in range(1, r + 1)]
    es += [(i, n - 1) for i in range(1, s + 1)]
    if plus:
        es.append((0, n - 1))
    return Graph(n, set(_norm(u, v) for u, v in es))


# The four small graphs drawn in the catalogue figure.  Vertices are numbered
# in reading order: top row left to right, then bottom row left to right,
# then any vertex between the rows.
_K33 = [(t, b) for t in range(3) for b in range(3, 6)]
_SMALL: Dict[str, Tuple[int, List[Edge]]] = {
    "A": (6, _K33 + [(1, 2)]),
    "A+": (6, _K33 + [(1, 2), (4, 5)]),
    # top t0..t3 = 0..3, bottom (left, middle, right) = 4, 5, 6
    "B": (7, [(0, 5), (0, 1), (1, 6), (0, 4), (1, 4), (2, 4), (3, 4),
              (2, 5), (2, 6), (3, 5), (3, 6)]),
    # as B, plus vertex 7 between the rows joined to t0, t1 and the bottom-left vertex
    "C": (8, [(0, 5), (0, 1), (1, 6), (2, 4), (2, 5), (2, 6), (3, 4), (3, 5),
              (3, 6), (0, 7), (1, 7), (4, 7)]),
    # top (left, right) = 0, 1; middle row left to right = 2, 3, 4; bottom (left, right) = 5, 6
    "D": (7, [(5, 6), (5, 0), (0, 3), (3, 5), (6, 4), (4, 1), (1, 6),
              (1, 0), (0, 2), (2, 5), (2, 3), (3, 4)]),
}
_SMALL["B+"] = (7, _SMALL["B"][1] + [(2, 3)])
_SMALL["C+"] = (8, _SMALL["C"][1] + [(2, 3)])


def catalog(name: str, *params: int) -> Graph:
    """Named graph.

    Names: K, K_minus, K_ab, C, P, W, F, A, A+, B, B+, C, C+, D, G, G+,
    K23_plus_edge, square_of_path.  Parameterised families take their
    integers as extra arguments, e.g. ``catalog("G+", 7, 3, 3)``.
    """
    fams = {
        "K": (complete, 1),
        "K_minus": (complete_minus, 1),
        "K_ab": (complete_bipartite, 2),
        "C": (cycle, 1),
        "P": (path, 1),
        "W": (wheel, 1),
        "F": (fan, 1),
        "square_of_path": (square_of_path, 1),
        "G": (lambda n, r, s: g_nrs(n, r, s), 3),
        "G+": (lambda n, r, s: g_nrs(n, r, s, plus=True), 3),
    }
    if name in _SMALL and not params:
        n, es = _SMALL[name]
        return Graph(n, es)
    if name == "K23_plus_edge" and not params:
        return k23_plus_edge()
    if name in fams:
        fn, arity = fams[name]
        if len(params) != arity:
            raise GraphError(f"{name} takes {arity} integer parameter(s)")
        return fn(*params)
    raise GraphError(f"unknown catalog graph {name!r}")


_NAME_PATTERNS = [
    (r"K_?\{?(\d+),(\d+)\}?", "K_ab"),
    (r"K(\d+)(?:-|_minus|⁻)", "K_minus"),
    (r"K_?(\d+)", "K"),
    (r"C_?(\d+)", "C"),
    (r"P_?(\d+)", "P"),
    (r"W_?(\d+)", "W"),
    (r"F_?(\d+)", "F"),
    (r"square_of_path\((\d+)\)", "square_of_path"),
    (r"G\+\((\d+),(\d+),(\d+)\)", "G+"),
    (r"G\((\d+),(\d+),(\d+)\)", "G"),
    (r"G_?(\d)(\d)(\d)\+", "G+"),
    (r"G_?(\d)(\d)(\d)", "G"),
]


def parse_graph_name(text: str) -> Graph:
    """Graph from a catalog spelling such as 'K5-', 'K3,3', 'C6', 'G+(7,3,3)' or 'A+'."""
    s = text.replace(" ", "")
    if s in _SMALL or s == "K23_plus_edge":
        return catalog(s)
    if s == "G6+":
        return catalog("G+", 6, 2, 3)
    for pat, fam in _NAME_PATTERNS:
        mt = re.fullmatch(pat, s)
        if mt:
            return catalog(fam, *(int(x) for x in mt.groups()))
    raise GraphError(f"unknown catalog graph {text!r}")


def read_graph(text: str) -> Graph:
    """Parse the 'n m' + edge-lines format."""
    lines = [ln.split() for ln in text.strip().splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise GraphError("empty graph file")
    n, m = int(lines[0][0]), int(lines[0][1])
    es = [(int(a), int(b)) for a, b in lines[1:]]
    if len(es) != m:
        raise GraphError(f"header says {m} edges, found {len(es)}")
    return Graph(n, es)


def write_graph(g: Graph) -> str:
    return "\n".join([f"{g.n} {g.m}"] + [f"{u} {v}" for u, v in g.edges]) + "\n"


def load_graph(ref: str) -> Graph:
    """A path to a graph file, or a catalog name."""
    import os

    if os.path.exists(ref):
        with open(ref) as fh:
            return read_graph(fh.read())
    return parse_graph_name(ref)
