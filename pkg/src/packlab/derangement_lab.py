"""Derangements, common derangements, permanents of 0/1 matrices and the
extremal perfect-matching counts of min-degree-d subgraphs of K_{8,8}.

Conventions: a permutation p of [k] is a tuple with p[i] the value at
position i.  A common derangement of p_1..p_r is a tau with tau(i) != p_j(i)
for all i, j; these are the perfect matchings of the bipartite graph
(positions x values) that keeps (i, v) unless some p_j(i) = v.
"""
from __future__ import annotations

import random
import time
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from . import _kernels
from .perms import (
    Perm,
    all_perms,
    class_representatives,
    identity,
    is_derangement_of,
)

Matrix = Tuple[Tuple[int, ...], ...]


class NoPerfectMatching(ValueError):
    pass


# ---------------------------------------------------------------------------
# counting


def count_derangements(k: int) -> int:
    """D_k via D_k = (k-1)(D_{k-1} + D_{k-2})."""
    if k < 0:
        raise ValueError("k must be non-negative")
    a, b = 1, 0  # D_0, D_1
    if k == 0:
        return 1
    for m in range(2, k + 1):
        a, b = b, (m - 1) * (a + b)
    return b


def _as_rows(m) -> List[List[int]]:
    rows = [list(map(int, r)) for r in m]
    if any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square")
    return rows


def permanent(m) -> int:
    """Permanent of a square integer matrix (subset DP over columns, exact)."""
    rows = _as_rows(m)
    n = len(rows)
    if n == 0:
        return 1
    dp = {0: 1}
    for r in range(n):
        nxt: Dict[int, int] = defaultdict(int)
        row = rows[r]
        for mask, val in dp.items():
            for j in range(n):
                if row[j] and not (mask >> j) & 1:
                    nxt[mask | (1 << j)] += val * row[j]
        dp = nxt
    return dp.get((1 << n) - 1, 0)


def permanent_ryser(m) -> int:
    """Ryser's inclusion-exclusion formula with Gray-code updates."""
    rows = _as_rows(m)
    n = len(rows)
    if n == 0:
        return 1
    total = 0
    sums = [0] * n
    prev = 0
    for g in range(1, 1 << n):
        gray = g ^ (g >> 1)
        diff = gray ^ prev
        j = diff.bit_length() - 1
        sign = 1 if gray & diff else -1
        for i in range(n):
            sums[i] += sign * rows[i][j]
        prev = gray
        prod = 1
        for s in sums:
            prod *= s
            if prod == 0:
                break
        total += (-1) ** bin(gray).count("1") * prod
    return (-1) ** n * total


def batch_permanents(mats: np.ndarray) -> np.ndarray:
    mats = np.ascontiguousarray(mats, dtype=np.int64)
    return _kernels.batch_permanent(mats)


def allowed_matrix(perms: Sequence[Sequence[int]]) -> Matrix:
    """0/1 matrix with (i, v) = 1 iff no given permutation has value v at i."""
    k = len(perms[0])
    if any(len(p) != k for p in perms):
        raise ValueError("permutations of different sizes")
    return tuple(tuple(int(all(p[i] != v for p in perms)) for v in range(k)) for i in range(k))


def common_derangements(perms: Sequence[Sequence[int]]) -> int:
    """Number of common derangements, as the permanent of the allowed matrix."""
    if not perms:
        raise ValueError("need at least one permutation")
    return permanent(allowed_matrix(perms))


def common_derangements_direct(perms: Sequence[Sequence[int]]) -> int:
    """Same count by walking all of S_k."""
    k = len(perms[0])
    return sum(1 for t in all_perms(k) if all(is_derangement_of(t, p) for p in perms))


# ---------------------------------------------------------------------------
# triples of permutations of [5]


@dataclass
class TripleReport:
    histogram: Dict[int, int]
    pair_minimum: int
    triples_checked: int
    gap_ok: bool              # every count is 0 or >= 2
    two_are_mutual: bool      # exactly two common derangements -> they derange each other
    zero_structure_ok: bool   # zero triples are three cyclic shifts on 3 positions
    zero_structure_converse: bool
    pairs_max_zero_ext: int
    zero_ext_never_mutual: bool
    pairs_with_two_zero_ext: int

    @property
    def ok(self) -> bool:
        return (self.gap_ok and self.two_are_mutual and self.zero_structure_ok
                and self.zero_structure_converse and self.pairs_max_zero_ext <= 2
                and self.zero_ext_never_mutual and self.pair_minimum == 12)


def _cyclic_block(ps: Sequence[Sequence[int]]) -> bool:
    """Is there a 3-set X of positions on which the three rows form a Latin
    square (i.e. are cyclic rotations of one another)?"""
    k = len(ps[0])
    for xs in combinations(range(k), 3):
        vals = {ps[0][x] for x in xs}
        if len(vals) == 3 and all({p[x] for p in ps} == vals for x in xs):
            return True
    return False


def classify_triples_5() -> TripleReport:
    """All triples (id, b, c) of permutations of [5].

    Fixing the first permutation to the identity loses nothing: replacing
    every p by a o p (relabel values) maps common derangements bijectively.
    """
    k = 5
    ps = all_perms(k)
    masks = []
    for p in ps:
        m = 0
        for q, t in enumerate(ps):
            if is_derangement_of(t, p):
                m |= 1 << q
        masks.append(m)
    ident = 0
    hist: Counter = Counter()
    pair_min = min(bin(masks[ident] & masks[b]).count("1") for b in range(len(ps)))
    gap_ok = mutual = struct_ok = conv_ok = True
    never_mutual = True
    max_zero = 0
    with_two = 0
    for b in range(len(ps)):
        mb = masks[ident] & masks[b]
        zeros = []
        for c in range(len(ps)):
            m = mb & masks[c]
            cnt = bin(m).count("1")
            hist[cnt] += 1
            trip = (ps[ident], ps[b], ps[c])
            if cnt == 1:
                gap_ok = False
            elif cnt == 2:
                i1 = (m & -m).bit_length() - 1
                i2 = (m ^ (1 << i1)).bit_length() - 1
                if not is_derangement_of(ps[i1], ps[i2]):
                    mutual = False
            elif cnt == 0:
                zeros.append(c)
                if not _cyclic_block(trip):
                    struct_ok = False
            if cnt > 0 and _cyclic_block(trip):
                conv_ok = False
        max_zero = max(max_zero, len(zeros))
        if len(zeros) == 2:
            with_two += 1
            if is_derangement_of(ps[zeros[0]], ps[zeros[1]]):
                never_mutual = False
    return TripleReport(dict(sorted(hist.items())), pair_min, len(ps) ** 2, gap_ok, mutual,
                        struct_ok, conv_ok, max_zero, never_mutual, with_two)


# ---------------------------------------------------------------------------
# permutations of [8]: pairs and triples


@lru_cache(maxsize=None)
def perm_array(k: int) -> np.ndarray:
    return np.array(all_perms(k), dtype=np.int64)


def _row_masks(perms: Sequence[Sequence[int]], k: int) -> np.ndarray:
    full = (1 << k) - 1
    out = np.full(k, full, dtype=np.int64)
    for p in perms:
        for i in range(k):
            out[i] &= ~(1 << p[i])
    return out


def common_derangements_with_each(perms: Sequence[Sequence[int]], k: int,
                                  candidates: Optional[np.ndarray] = None) -> np.ndarray:
    """For every candidate sigma (default: all of S_k), the number of common
    derangements of perms + [sigma]."""
    cand = perm_array(k) if candidates is None else np.ascontiguousarray(candidates, dtype=np.int64)
    return _kernels.batch_permanent_rows(_row_masks(perms, k), cand)


def pair_minimum(k: int) -> Tuple[int, List[Perm]]:
    """min over pairs of the common-derangement count; pairs reduce to
    (identity, class representative)."""
    best, arg = None, []
    for r in class_representatives(k):
        v = common_derangements([identity(k), r])
        if best is None or v < best:
            best, arg = v, [r]
        elif v == best:
            arg.append(r)
    return best, arg


@dataclass
class TupleScan:
    minimum: int
    argmin: List[Tuple[Perm, ...]]
    checked: int
    histogram_low: Dict[int, int] = field(default_factory=dict)


def triple_scan(k: int = 8) -> TupleScan:
    """Exhaustive (id, class rep, sigma) scan: conjugating by the right beta
    turns any triple (id, s2, s3) into (id, rep(s2), beta s3 beta^-1)."""
    best = None
    arg: List[Tuple[Perm, ...]] = []
    ps = all_perms(k)
    checked = 0
    low: Counter = Counter()
    for r in class_representatives(k):
        counts = common_derangements_with_each([identity(k), r], k)
        checked += len(counts)
        m = int(counts.min())
        for v, c in zip(*np.unique(counts[counts < 2000], return_counts=True)):
            low[int(v)] += int(c)
        if best is None or m < best:
            best, arg = m, []
        if m == best:
            arg.extend((identity(k), r, ps[i]) for i in np.flatnonzero(counts == m))
    return TupleScan(best, arg, checked, dict(sorted(low.items())))


# ---------------------------------------------------------------------------
# canonical forms of bipartite graphs on 8 + 8 (or n + n) vertices


@lru_cache(maxsize=None)
def _row_perm_array(n: int) -> np.ndarray:
    return np.array(list(permutations(range(n))), dtype=np.int64)


def _canon_key(mat: np.ndarray) -> Tuple[int, ...]:
    n = mat.shape[0]
    rp = _row_perm_array(n)
    weights = (1 << np.arange(n - 1, -1, -1)).astype(np.int64)
    permuted = mat[rp]  # (n!, n, n): rows reordered
    codes = np.einsum("prc,r->pc", permuted, weights)  # column codes
    codes = -np.sort(-codes, axis=1)  # descending
    # lexicographic maximum over the row orders
    best = np.arange(codes.shape[0])
    for c in range(n):
        col = codes[best, c]
        best = best[col == col.max()]
    return tuple(int(x) for x in codes[best[0]])


def canonical_form(m, allow_transpose: bool = True) -> Tuple[int, ...]:
    """Deterministic canonical form under row and column permutations (and,
    by default, swapping the two sides).  Column codes read the rows as bits."""
    mat = np.array(m, dtype=np.int64)
    key = _canon_key(mat)
    if allow_transpose:
        key = max(key, _canon_key(mat.T.copy()))
    return key


def matrix_from_key(key: Sequence[int]) -> np.ndarray:
    n = len(key)
    mat = np.zeros((n, n), dtype=np.int64)
    for c, code in enumerate(key):
        for r in range(n):
            mat[r, c] = (code >> (n - 1 - r)) & 1
    return mat


def union_of_perms(perms: Sequence[Sequence[int]], k: int) -> np.ndarray:
    mat = np.zeros((k, k), dtype=np.int64)
    for p in perms:
        for i in range(k):
            mat[i, p[i]] = 1
    return mat


# ---------------------------------------------------------------------------
# bad permutations for four rows over [8]


HALL_TYPES = ((5, 3), (5, 4), (4, 3))


@dataclass
class BadReport:
    bad: List[Perm]
    tags: Dict[Perm, str]
    types: Dict[Perm, Tuple[Tuple[int, int], ...]]

    def __len__(self) -> int:
        return len(self.bad)


def _bad_direct(rows: Sequence[Sequence[int]]) -> np.ndarray:
    counts = common_derangements_with_each(rows, 8)
    return np.flatnonzero(counts == 0)


def bad_indices(rows: Sequence[Sequence[int]]) -> np.ndarray:
    """Indices (into all_perms(8)) of bad sigma, by matching search only."""
    pa = perm_array(8)
    common = pa[np.all(np.stack([pa != np.asarray(r)[None, :] for r in rows]), axis=(0, 2))]
    # spread-out common derangements serve as ready-made matchings
    wit = common[:: max(1, len(common) // 24)][:24] if len(common) else np.zeros((0, 8), dtype=np.int64)
    ok = _kernels.batch_has_matching_rows(_row_masks(rows, 8), pa, np.ascontiguousarray(wit))
    return np.flatnonzero(~ok)


def _hall_types(rows: Sequence[Sequence[int]], k: int = 8) -> Tuple[np.ndarray, np.ndarray]:
    """Second route: for every sigma, the set of (|I|, |N(I)|) Hall violations of
    the allowed graph of rows + [sigma], as a bitmask over all pairs (s, t)."""
    base = _row_masks(rows, k)
    pa = perm_array(k)
    allowed = base[None, :] & ~(np.int64(1) << pa)  # (k!, k)
    popcnt = np.array([bin(x).count("1") for x in range(1 << k)], dtype=np.int64)
    viol = np.zeros(pa.shape[0], dtype=np.int64)
    for subset in range(1, 1 << k):
        idx = [i for i in range(k) if (subset >> i) & 1]
        nb = np.bitwise_or.reduce(allowed[:, idx], axis=1)
        sz = popcnt[nb]
        hit = sz < len(idx)
        if hit.any():
            code = len(idx) * (k + 1) + sz[hit]
            viol[hit] |= np.int64(1) << code
    return viol, pa


def bad_permutations(a: Sequence[Sequence[int]]) -> BadReport:
    """All sigma such that the rows of a plus sigma have no common derangement,
    each tagged with the Hall-violation type it exhibits first in the order
    (5,3), (5,4), (4,3)."""
    rows = [tuple(r) for r in a]
    if len(rows) != 4 or any(sorted(r) != list(range(8)) for r in rows):
        raise ValueError("need four permutations of range(8)")
    ps = all_perms(8)
    direct = _bad_direct(rows)
    viol, _ = _hall_types(rows)
    bad = [ps[i] for i in direct]
    tags, types = {}, {}
    for i in direct:
        found = []
        for s in range(1, 9):
            for t in range(0, 9):
                if (int(viol[i]) >> (s * 9 + t)) & 1:
                    found.append((s, t))
        types[ps[i]] = tuple(found)
        tag = "none"
        for s, t in HALL_TYPES:
            if (s, t) in found:
                tag = f"({s},{t})"
                break
        tags[ps[i]] = tag
    return BadReport(bad, tags, types)


def bad_permutations_hall(a: Sequence[Sequence[int]]) -> List[Perm]:
    """Bad sigma found purely from Hall violations (no permanents)."""
    viol, _ = _hall_types([tuple(r) for r in a])
    ps = all_perms(8)
    return [ps[i] for i in np.flatnonzero(viol != 0)]


def could_have_bad(a: Sequence[Sequence[int]]) -> bool:
    """Necessary condition for any bad sigma: some value set V with |V| in
    {4, 5} is almost contained in enough columns of a (see Hall types)."""
    cols = [set(r[i] for r in a) for i in range(8)]
    for size, need in ((5, 4), (4, 5)):
        for vs in combinations(range(8), size):
            v = set(vs)
            if sum(1 for c in cols if len(c & v) >= size - 1) >= need:
                return True
    return False


def agreement_structure(bad: Sequence[Perm]) -> Optional[Tuple[Perm, Tuple[int, ...]]]:
    """A (sigma, I) with |I| = 5 such that every bad tau agrees with sigma on
    at least 4 positions of I, or None.  Only sigma|I matters; every valid
    sigma|I differs from bad[0]|I in at most one position."""
    if not bad:
        return None
    t0 = bad[0]
    for xs in combinations(range(8), 5):
        base = {x: t0[x] for x in xs}
        cands = [dict(base)]
        for x in xs:
            for v in range(8):
                if v != base[x] and v not in {base[y] for y in xs if y != x}:
                    d = dict(base)
                    d[x] = v
                    cands.append(d)
        for d in cands:
            if all(sum(1 for x in xs if t[x] == d[x]) >= 4 for t in bad):
                rest = [v for v in range(8) if v not in d.values()]
                sigma = []
                for i in range(8):
                    sigma.append(d[i] if i in d else rest.pop(0))
                return tuple(sigma), xs
    return None


def parse_perm_row(text: str) -> Perm:
    """'51234786' (1-based digits) -> 0-based tuple."""
    return tuple(int(ch) - 1 for ch in text.strip())


CASE_ONE_ROWS = ("51234786", "45123678", "34512867", "23451687")
CASE_TWO_ROWS = ("51234786", "45123678", "34512867", "23461587")


def random_planted_matrix(rng: random.Random) -> List[Perm]:
    """Four rows of [8] with a planted Latin block on random positions/values."""
    kind = rng.choice(("53", "43", "54"))
    cols = rng.sample(range(8), 8)
    vals = rng.sample(range(8), 8)
    rows = [[None] * 8 for _ in range(4)]
    if kind in ("53", "54"):
        block_c, block_v = cols[:5], vals[:5]
        shift = rng.sample(range(5), 4)
        for r, s in enumerate(shift):
            for j, c in enumerate(block_c):
                rows[r][c] = block_v[(j + s) % 5]
        if kind == "54":
            # replace one value per column by a value outside the block
            for j, c in enumerate(block_c):
                r = rng.randrange(4)
                rows[r][c] = None
    else:
        block_c, block_v = cols[:4], vals[:5]
        shift = rng.sample(range(5), 4)
        for r, s in enumerate(shift):
            for j, c in enumerate(block_c):
                rows[r][c] = block_v[(j + s) % 5]
    out = []
    for r in rows:
        used = {x for x in r if x is not None}
        free = [v for v in range(8) if v not in used]
        rng.shuffle(free)
        out.append(tuple(x if x is not None else free.pop() for x in r))
    return out


def random_perm(k: int, rng: random.Random) -> Perm:
    p = list(range(k))
    rng.shuffle(p)
    return tuple(p)


# ---------------------------------------------------------------------------
# five pairs and perfect matchings


def check_five_pairs(m, pairs: Sequence[Tuple[int, int]]) -> bool:
    """Is there a perfect matching using fewer than four of the given pairs?

    Raises NoPerfectMatching when the graph has no perfect matching at all.
    """
    rows = _as_rows(m)
    n = len(rows)
    marked = {(int(i), int(j)) for i, j in pairs}
    inf = n + 1
    dp = {0: 0}
    for r in range(n):
        nxt: Dict[int, int] = {}
        for mask, val in dp.items():
            for j in range(n):
                if rows[r][j] and not (mask >> j) & 1:
                    nm = mask | (1 << j)
                    nv = val + ((r, j) in marked)
                    if nv < nxt.get(nm, inf):
                        nxt[nm] = nv
        dp = nxt
    full = (1 << n) - 1
    if full not in dp:
        raise NoPerfectMatching("the graph has no perfect matching")
    return dp[full] < 4


def min_degree(mat) -> int:
    a = np.asarray(mat)
    return int(min(a.sum(axis=0).min(), a.sum(axis=1).min()))


# ---------------------------------------------------------------------------
# edge-minimal min-degree-d subgraphs of K_{n,n}


@dataclass
class FamilyEnumeration:
    matrices: List[Tuple[int, ...]]  # rows as bitmasks (column 0 = high bit)
    complete: bool
    nodes: int


def _popcount(x: int) -> int:
    return bin(x).count("1")


def enumerate_edge_minimal(
    d: int,
    n: int = 8,
    row_blocks: Sequence[int] = (8,),
    col_blocks: Sequence[int] = (8,),
    forbidden: Optional[Sequence[int]] = None,
    budget: Optional[int] = None,
    on_matrix=None,
) -> FamilyEnumeration:
    """Matrices with every row/column sum >= d in which every 1 lies in a row
    or column of sum exactly d, rows non-increasing and columns
    non-increasing (as vectors, top row most significant) within blocks.

    Every isomorphism class of the family appears at least once (double-lex
    ordering exists for each matrix); duplicates are removed by the caller
    through canonical forms.  ``forbidden[r]`` is a bitmask of columns that
    must be zero in row r (used to impose Hall-violator block structure).
    """
    top = 1 << (n - 1)
    colbit = [top >> j for j in range(n)]
    forbidden = list(forbidden) if forbidden is not None else [0] * n
    # adjacent column pairs that must stay ordered: same block
    col_block_of = []
    for b, size in enumerate(col_blocks):
        col_block_of += [b] * size
    row_block_of = []
    for b, size in enumerate(row_blocks):
        row_block_of += [b] * size
    ordered_pairs = [j for j in range(n - 1) if col_block_of[j] == col_block_of[j + 1]]
    all_rows = sorted((x for x in range(1 << n) if _popcount(x) >= d), reverse=True)
    out: List[Tuple[int, ...]] = []
    nodes = 0
    complete = True
    colsum = [0] * n
    rows: List[int] = []

    class Stop(Exception):
        pass

    def feasible_end() -> bool:
        for j in range(n):
            if colsum[j] < d:
                return False
        tight_cols = 0
        for j in range(n):
            if colsum[j] == d:
                tight_cols |= colbit[j]
        for x in rows:
            if _popcount(x) > d and x & ~tight_cols:
                return False
        return True

    def rec(r: int, tied: int, nontight_rows_or: int):
        nonlocal nodes, complete
        if r == n:
            if feasible_end():
                mat = tuple(rows)
                out.append(mat)
                if on_matrix is not None:
                    on_matrix(mat)
            return
        remaining = n - r
        for j in range(n):
            if colsum[j] + remaining < d:
                return
        prev = rows[-1] if rows and row_block_of[r - 1] == row_block_of[r] else None
        for x in all_rows:
            if prev is not None and x > prev:
                continue
            if x & forbidden[r]:
                continue
            # column lex order within blocks
            ok = True
            new_tied = tied
            for j in ordered_pairs:
                if (tied >> j) & 1:
                    a = x & colbit[j]
                    b = x & colbit[j + 1]
                    if not a and b:
                        ok = False
                        break
                    if a and not b:
                        new_tied &= ~(1 << j)
            if not ok:
                continue
            nodes += 1
            if budget is not None and nodes > budget:
                complete = False
                raise Stop
            heavy = _popcount(x) > d
            nto = nontight_rows_or | (x if heavy else 0)
            for j in range(n):
                if x & colbit[j]:
                    colsum[j] += 1
            # a column above d needs all its rows tight; a heavy row needs its columns tight
            bad = False
            for j in range(n):
                if colsum[j] > d and nto & colbit[j]:
                    bad = True
                    break
            if not bad:
                rows.append(x)
                rec(r + 1, new_tied, nto)
                rows.pop()
            for j in range(n):
                if x & colbit[j]:
                    colsum[j] -= 1

    full_tied = 0
    for j in ordered_pairs:
        full_tied |= 1 << j
    try:
        rec(0, full_tied, 0)
    except Stop:
        pass
    return FamilyEnumeration(out, complete, nodes)


def rows_to_matrix(rows: Sequence[int], n: int = 8) -> np.ndarray:
    mat = np.zeros((n, n), dtype=np.int64)
    for r, x in enumerate(rows):
        for j in range(n):
            mat[r, j] = (x >> (n - 1 - j)) & 1
    return mat


def complement_cycle_family() -> List[Tuple[str, np.ndarray]]:
    """Subgraphs of K_{8,8} whose bipartite complement is a 2-factor (even
    cycles), or one edge plus a 2-factor on the other 7 + 7 vertices."""
    from .perms import integer_partitions

    out = []

    def add_cycles(mat, parts, offset):
        for p in parts:
            # cycle through left offset..offset+p-1 and right offset..offset+p-1
            for t in range(p):
                mat[offset + t, offset + t] = 0
                mat[offset + t, offset + (t + 1) % p] = 0
            offset += p
        return offset

    for parts in integer_partitions(8):
        if min(parts) >= 2:
            mat = np.ones((8, 8), dtype=np.int64)
            add_cycles(mat, parts, 0)
            out.append(("+".join(f"C{2 * p}" for p in parts), mat))
    for parts in integer_partitions(7):
        if min(parts) >= 2:
            mat = np.ones((8, 8), dtype=np.int64)
            add_cycles(mat, parts, 0)
            mat[7, 7] = 0
            out.append(("+".join(f"C{2 * p}" for p in parts) + "+K2", mat))
    return out


# Extremal graphs found by the regular-graph search (canonical keys, see
# canonical_form).  They are re-derived by the checks below, not trusted.
@dataclass
class FamilyReport:
    d: int
    minimum: Optional[int]
    attaining: List[Tuple[int, ...]]
    family_size: Optional[int] = None
    exhaustive: bool = False
    checked: int = 0
    zero_classes: Optional[int] = None
    zero_classes_no_transpose: Optional[int] = None
    augmented_minimum: Optional[int] = None
    nonzero_minimum: Optional[int] = None
    regular_attaining_classes: Optional[int] = None
    notes: List[str] = field(default_factory=list)
    elapsed: float = 0.0


def regular_scan_3() -> Tuple[int, Set[Tuple[int, ...]], int]:
    """Every 3-regular bipartite graph on 8+8 is id + sigma2 + sigma3 with
    pairwise disjoint perfect matchings; sigma2 is a derangement taken up to
    conjugacy.  Returns min permanent, canonical keys attaining it, count."""
    k = 8
    pa = perm_array(k)
    best = None
    keys: Set[Tuple[int, ...]] = set()
    checked = 0
    for r in class_representatives(k):
        if any(r[i] == i for i in range(k)):
            continue
        ok = np.all((pa != np.arange(k)) & (pa != np.array(r)), axis=1)
        cand = pa[ok]
        base = union_of_perms([identity(k), r], k)
        mats = np.repeat(base[None], len(cand), axis=0)
        mats[np.arange(len(cand))[:, None], np.arange(k)[None, :], cand] = 1
        counts = batch_permanents(mats)
        checked += len(cand)
        m = int(counts.min())
        if best is None or m < best:
            best, keys = m, set()
        if m == best:
            for i in np.flatnonzero(counts == m):
                keys.add(canonical_form(mats[i]))
    return best, keys, checked


def zero_matching_classes() -> Tuple[Set[Tuple[int, ...]], int, List[np.ndarray]]:
    """Edge-minimal min-degree-3 subgraphs of K_{8,8} without perfect matching.

    A Hall violator I (rows), N(I) = J has |J| >= 3 (row degrees) and
    |I| <= 5 (columns outside J see only the other rows), so (|I|, |J|) is
    (4,3), (5,3) or (5,4).  Enumerate each block shape separately."""
    keys: Set[Tuple[int, ...]] = set()
    keys_nt: Set[Tuple[int, ...]] = set()
    mats = []
    for i_size, j_size in ((4, 3), (5, 3), (5, 4)):
        jmask = 0
        for j in range(j_size):
            jmask |= 1 << (7 - j)
        forb = [(~jmask) & 0xFF if r < i_size else 0 for r in range(8)]
        fam = enumerate_edge_minimal(3, row_blocks=(i_size, 8 - i_size), col_blocks=(j_size, 8 - j_size),
                                     forbidden=forb)
        for rows in fam.matrices:
            mat = rows_to_matrix(rows)
            if permanent(mat.tolist()) != 0:
                continue
            key = canonical_form(mat)
            if key not in keys:
                keys.add(key)
                mats.append(mat)
            keys_nt.add(canonical_form(mat, allow_transpose=False))
    return keys, len(keys_nt), mats


def augmentation_minimum(mat: np.ndarray) -> int:
    """Min permanent after adding edges so a perfect matching exists.

    Any successful augmentation contains M \\ E for some perfect matching M
    of K_{8,8}, and the permanent is monotone, so minimising over the 8!
    sets M \\ E is exact."""
    pa = perm_array(8)
    mats = np.repeat(mat[None], len(pa), axis=0)
    mats[np.arange(len(pa))[:, None], np.arange(8)[None, :], pa] = 1
    return int(batch_permanents(mats).min())


def _regular_random(d: int, rng: random.Random) -> np.ndarray:
    """Random d-regular bipartite graph as a union of d disjoint perfect matchings."""
    while True:
        mat = np.zeros((8, 8), dtype=np.int64)
        ok = True
        for _ in range(d):
            allowed = (1 - mat).tolist()
            perm = _random_pm(allowed, rng)
            if perm is None:
                ok = False
                break
            for i, j in enumerate(perm):
                mat[i, j] = 1
        if ok:
            return mat


def _random_pm(allowed, rng: random.Random) -> Optional[List[int]]:
    n = len(allowed)
    for _ in range(200):
        used = set()
        out = []
        for i in range(n):
            opts = [j for j in range(n) if allowed[i][j] and j not in used]
            if not opts:
                break
            j = rng.choice(opts)
            used.add(j)
            out.append(j)
        if len(out) == n:
            return out
    return None


def search_regular_minimum(d: int, seed: int = 0, restarts: int = 30, steps: int = 3000) -> Tuple[int, Set[Tuple[int, ...]]]:
    """Local search over d-regular bipartite graphs on 8+8 vertices using
    2-switches (i,a),(j,b) -> (i,b),(j,a), minimising the permanent."""
    rng = random.Random(seed)
    best = None
    keys: Set[Tuple[int, ...]] = set()
    for _ in range(restarts):
        mat = _regular_random(d, rng)
        cur = permanent(mat.tolist())
        for _ in range(steps):
            i, j = rng.sample(range(8), 2)
            a = rng.choice([c for c in range(8) if mat[i, c] and not mat[j, c]] or [None])
            b = rng.choice([c for c in range(8) if mat[j, c] and not mat[i, c]] or [None])
            if a is None or b is None:
                continue
            mat[i, a] = mat[j, b] = 0
            mat[i, b] = mat[j, a] = 1
            val = permanent(mat.tolist())
            if val <= cur:
                cur = val
            else:
                mat[i, a] = mat[j, b] = 1
                mat[i, b] = mat[j, a] = 0
        if best is None or cur < best:
            best, keys = cur, set()
        if cur == best:
            keys.add(canonical_form(mat))
    return best, keys


def sample_tuples(r: int, samples: int, seed: int = 0) -> np.ndarray:
    """Common-derangement counts for random r-tuples of permutations of [8]."""
    rng = np.random.default_rng(seed)
    perms = np.array([rng.permutation(8) for _ in range(samples * r)]).reshape(samples, r, 8)
    mats = np.ones((samples, 8, 8), dtype=np.int64)
    idx = np.arange(samples)[:, None]
    for t in range(r):
        mats[idx, np.arange(8)[None, :], perms[:, t, :]] = 0
    return batch_permanents(mats)


def min_permanent_family(d: int, budget: Optional[int] = None, exhaustive: bool = False,
                         samples: int = 2000, seed: int = 0) -> FamilyReport:
    """Minimum number of perfect matchings over edge-minimal min-degree-d
    subgraphs of K_{8,8} (d in 3..6); see FamilyReport for the fields."""
    if d not in (3, 4, 5, 6):
        raise ValueError("d must be 3, 4, 5 or 6")
    t0 = time.time()
    if d == 6:
        fam = complement_cycle_family()
        perms_ = [(name, permanent(m.tolist())) for name, m in fam]
        keys = {canonical_form(m) for _, m in fam}
        mn = min(v for _, v in perms_)
        rep = FamilyReport(6, mn, [canonical_form(m) for (name, m), (_, v) in zip(fam, perms_) if v == mn],
                           family_size=len(keys), exhaustive=True, checked=len(fam))
        rep.notes = [f"{name}: {v}" for name, v in perms_]
        if exhaustive:
            gen = enumerate_edge_minimal(6, budget=budget)
            gk = {canonical_form(rows_to_matrix(x)) for x in gen.matrices}
            rep.notes.append(f"generic enumeration classes: {len(gk)} (complete={gen.complete})")
            rep.exhaustive = gen.complete and gk == keys
        rep.elapsed = time.time() - t0
        return rep
    if d == 5:
        scan = triple_scan(8)
        keys = {canonical_form(union_of_perms(t, 8)) for t in scan.argmin}
        rep = FamilyReport(5, scan.minimum, sorted(keys), exhaustive=True, checked=scan.checked)
        rep.notes.append("all triples of permutations up to symmetry")
        if exhaustive:
            _family_exhaust(rep, 5, budget)
        rep.elapsed = time.time() - t0
        return rep
    if d == 4:
        mn, keys = search_regular_minimum(4, seed=seed)
        counts = sample_tuples(4, samples, seed)
        rep = FamilyReport(4, mn, sorted(keys), checked=samples)
        rep.notes.append(f"random quadruples: min {int(counts.min())}")
        if int(counts.min()) < mn:
            rep.minimum = int(counts.min())
        if exhaustive:
            _family_exhaust(rep, 4, budget)
        rep.elapsed = time.time() - t0
        return rep
    # d == 3
    mn, keys, checked = regular_scan_3()
    zkeys, znt, zmats = zero_matching_classes()
    aug = min(augmentation_minimum(m) for m in zmats)
    counts = sample_tuples(5, samples, seed)
    nz = counts[counts > 0]
    rep = FamilyReport(3, 0, sorted(keys), checked=checked, zero_classes=len(zkeys),
                       zero_classes_no_transpose=znt, augmented_minimum=aug,
                       nonzero_minimum=min(mn, int(nz.min()) if len(nz) else mn),
                       regular_attaining_classes=len(keys))
    rep.notes.append(f"3-regular minimum {mn}; random quintuples: {int((counts == 0).sum())} zero, "
                     f"min nonzero {int(nz.min()) if len(nz) else None}")
    if exhaustive:
        _family_exhaust(rep, 3, budget)
    rep.elapsed = time.time() - t0
    return rep


def _family_exhaust(rep: FamilyReport, d: int, budget: Optional[int]) -> None:
    """Walk the whole edge-minimal family and fold its permanents into rep."""
    stats = {"min_nonzero": None, "min": None, "count": 0}
    found: Dict[int, Set[Tuple[int, ...]]] = defaultdict(set)
    batch: List[Tuple[int, ...]] = []

    def flush():
        if not batch:
            return
        mats = np.array([rows_to_matrix(x) for x in batch])
        vals = batch_permanents(mats)
        for x, v in zip(batch, vals):
            v = int(v)
            stats["count"] += 1
            if stats["min"] is None or v < stats["min"]:
                stats["min"] = v
            if v > 0 and (stats["min_nonzero"] is None or v < stats["min_nonzero"]):
                stats["min_nonzero"] = v
            if v <= 36 or (d >= 4 and v <= 1300):
                found[v].add(x)
        batch.clear()

    def take(mat):
        batch.append(mat)
        if len(batch) >= 20000:
            flush()

    fam = enumerate_edge_minimal(d, budget=budget, on_matrix=take)
    flush()
    rep.exhaustive = fam.complete
    rep.family_size = None
    rep.checked += stats["count"]
    if d == 3:
        rep.nonzero_minimum = stats["min_nonzero"]
        zero = {canonical_form(rows_to_matrix(x)) for x in found.get(0, ())}
        rep.notes.append(f"exhaustive: {stats['count']} ordered matrices, {len(zero)} zero classes, "
                         f"min nonzero {stats['min_nonzero']} (complete={fam.complete})")
        rep.zero_classes = len(zero) if fam.complete else rep.zero_classes
    else:
        mn = stats["min"]
        keys = {canonical_form(rows_to_matrix(x)) for x in found.get(mn, ())}
        rep.notes.append(f"exhaustive: {stats['count']} ordered matrices, min {mn}, "
                         f"{len(keys)} attaining classes (complete={fam.complete})")
        if fam.complete:
            rep.minimum = mn
            rep.attaining = sorted(keys)
