"""Compiled inner loops: full-cover packing scans and batched permanents.

Everything here has a plain-Python twin elsewhere in the package that the
tests compare against.  If numba is missing the functions still run, slowly.
"""
from __future__ import annotations

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda f: f


@njit(cache=True)
def _lowest_bit_index(m):
    i = 0
    while (m >> np.uint64(i)) & np.uint64(1) == 0:
        i += 1
    return i


@njit(cache=True)
def full_cover_has_packing(n, nnb, nbr, nbr_edge, nbr_flip, eperm, comp, inv, der, counter):
    """Backtracking over perm indices in vertex order 0..n-1 (already reordered).

    Vertex 0 is fixed to the identity.  ``nbr[t, j]`` lists earlier neighbours
    of vertex t; the constraint from a neighbour w with perm pw is that c(t)
    deranges e o pw, where e is the edge perm seen from w.
    counter[0] accumulates expanded nodes.
    """
    assign = np.zeros(n, dtype=np.int64)
    cand = np.zeros(n, dtype=np.uint64)
    full = der.shape[0]
    allmask = np.uint64(0)
    for q in range(full):
        allmask |= np.uint64(1) << np.uint64(q)
    assign[0] = 0
    counter[0] += 1
    if n == 1:
        return True
    t = 1
    m = allmask
    for j in range(nnb[t]):
        e = eperm[nbr_edge[t, j]]
        if nbr_flip[t, j]:
            e = inv[e]
        m &= der[comp[e, assign[nbr[t, j]]]]
    cand[t] = m
    while t >= 1:
        if cand[t] == 0:
            t -= 1
            continue
        m = cand[t]
        low = m & (~m + np.uint64(1))
        cand[t] = m ^ low
        assign[t] = _lowest_bit_index(low)
        counter[0] += 1
        t += 1
        if t == n:
            return True
        m = allmask
        for j in range(nnb[t]):
            e = eperm[nbr_edge[t, j]]
            if nbr_flip[t, j]:
                e = inv[e]
            m &= der[comp[e, assign[nbr[t, j]]]]
        cand[t] = m
    return False


@njit(cache=True)
def scan_full_covers(n, nnb, nbr, nbr_edge, nbr_flip, base_eperm, free_edges, reps, radices,
                     start, stop, comp, inv, der, max_fail):
    """Check covers start..stop-1 of a FullCoverSpace; return failing indices."""
    eperm = base_eperm.copy()
    fails = np.empty(max_fail, dtype=np.int64)
    nfail = 0
    counter = np.zeros(1, dtype=np.int64)
    nfree = free_edges.shape[0]
    digits = np.zeros(nfree, dtype=np.int64)
    for idx in range(start, stop):
        x = idx
        for t in range(nfree - 1, -1, -1):
            digits[t] = x % radices[t]
            x //= radices[t]
        for t in range(nfree):
            if t == 0:
                eperm[free_edges[t]] = reps[digits[t]]
            else:
                eperm[free_edges[t]] = digits[t]
        ok = full_cover_has_packing(n, nnb, nbr, nbr_edge, nbr_flip, eperm, comp, inv, der, counter)
        if not ok:
            if nfail < max_fail:
                fails[nfail] = idx
            nfail += 1
    return fails[: min(nfail, max_fail)], nfail, counter[0]


@njit(cache=True)
def batch_permanent(mats):
    """Permanents of a batch of n x n 0/1 (or small integer) matrices via
    the row-by-row subset DP; shape (B, n, n) int64 -> (B,) int64."""
    b, n, _ = mats.shape
    size = 1 << n
    out = np.zeros(b, dtype=np.int64)
    dp = np.zeros(size, dtype=np.int64)
    pop = np.zeros(size, dtype=np.int64)
    for mask in range(1, size):
        pop[mask] = pop[mask >> 1] + (mask & 1)
    for t in range(b):
        for mask in range(size):
            dp[mask] = 0
        dp[0] = 1
        for mask in range(size - 1):
            v = dp[mask]
            if v == 0:
                continue
            r = pop[mask]
            for j in range(n):
                if not (mask >> j) & 1 and mats[t, r, j] != 0:
                    dp[mask | (1 << j)] += v * mats[t, r, j]
        out[t] = dp[size - 1]
    return out


@njit(cache=True)
def batch_permanent_rows(rows_mask, perms):
    """Permanents of matrices sharing a base: row i of matrix t allows the
    columns in bitmask rows_mask[i] except perms[t, i]."""
    b = perms.shape[0]
    n = rows_mask.shape[0]
    size = 1 << n
    out = np.zeros(b, dtype=np.int64)
    dp = np.zeros(size, dtype=np.int64)
    pop = np.zeros(size, dtype=np.int64)
    for mask in range(1, size):
        pop[mask] = pop[mask >> 1] + (mask & 1)
    for t in range(b):
        for mask in range(size):
            dp[mask] = 0
        dp[0] = 1
        for mask in range(size - 1):
            v = dp[mask]
            if v == 0:
                continue
            r = pop[mask]
            allowed = rows_mask[r] & ~(1 << perms[t, r])
            for j in range(n):
                if not (mask >> j) & 1 and (allowed >> j) & 1:
                    dp[mask | (1 << j)] += v
        out[t] = dp[size - 1]
    return out


@njit(cache=True)
def _augment(root, allowed, match_col, row_match, prev, queue, n):
    for j in range(n):
        prev[j] = -1
    head = 0
    tail = 1
    queue[0] = root
    seen = 0
    while head < tail:
        r = queue[head]
        head += 1
        cand = allowed[r] & ~seen
        for j in range(n):
            if not (cand >> j) & 1:
                continue
            seen |= 1 << j
            prev[j] = r
            if match_col[j] < 0:
                c = j
                while c >= 0:
                    rr = prev[c]
                    nc = row_match[rr]
                    match_col[c] = rr
                    row_match[rr] = c
                    c = nc
                return True
            queue[tail] = match_col[j]
            tail += 1
    return False


@njit(cache=True)
def batch_has_matching_rows(rows_mask, perms, witnesses):
    """Like batch_permanent_rows but only decides permanent > 0.  A witness
    (a perfect matching of the base rows) that avoids perms[t] settles t at
    once; otherwise augmenting paths decide."""
    b = perms.shape[0]
    n = rows_mask.shape[0]
    out = np.zeros(b, dtype=np.bool_)
    allowed = np.zeros(n, dtype=np.int64)
    match_col = np.zeros(n, dtype=np.int64)
    row_match = np.zeros(n, dtype=np.int64)
    prev = np.zeros(n, dtype=np.int64)
    queue = np.zeros(n + 1, dtype=np.int64)
    for t in range(b):
        quick = False
        for w in range(witnesses.shape[0]):
            hit = False
            for i in range(n):
                if witnesses[w, i] == perms[t, i]:
                    hit = True
                    break
            if not hit:
                quick = True
                break
        if quick:
            out[t] = True
            continue
        for i in range(n):
            allowed[i] = rows_mask[i] & ~(1 << perms[t, i])
            match_col[i] = -1
            row_match[i] = -1
        ok = True
        for r in range(n):
            if not _augment(r, allowed, match_col, row_match, prev, queue, n):
                ok = False
                break
        out[t] = ok
    return out
