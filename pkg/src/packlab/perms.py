"""Small helpers for permutations of {0..k-1} stored as tuples.

A permutation ``p`` maps ``i -> p[i]``. Composition ``compose(a, b)`` is
``a after b``, i.e. ``i -> a[b[i]]``.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import permutations
from typing import Dict, List, Sequence, Tuple

Perm = Tuple[int, ...]


def identity(k: int) -> Perm:
    return tuple(range(k))


def is_permutation(p: Sequence[int], k: int | None = None) -> bool:
    k = len(p) if k is None else k
    return len(p) == k and sorted(p) == list(range(k))


def compose(a: Sequence[int], b: Sequence[int]) -> Perm:
    return tuple(a[x] for x in b)


def inverse(p: Sequence[int]) -> Perm:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def is_derangement_of(a: Sequence[int], b: Sequence[int]) -> bool:
    """True when a[i] != b[i] for every position."""
    return all(x != y for x, y in zip(a, b))


@lru_cache(maxsize=None)
def all_perms(k: int) -> Tuple[Perm, ...]:
    """All permutations of range(k) in lexicographic order."""
    return tuple(permutations(range(k)))


@lru_cache(maxsize=None)
def perm_index(k: int) -> Dict[Perm, int]:
    return {p: i for i, p in enumerate(all_perms(k))}


def integer_partitions(n: int, largest: int | None = None) -> List[Tuple[int, ...]]:
    """Partitions of n into non-increasing parts."""
    largest = n if largest is None else largest
    if n == 0:
        return [()]
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in integer_partitions(n - first, first):
            out.append((first,) + rest)
    return out


def cycle_type(p: Sequence[int]) -> Tuple[int, ...]:
    seen = [False] * len(p)
    lengths = []
    for i in range(len(p)):
        if not seen[i]:
            j, n = i, 0
            while not seen[j]:
                seen[j] = True
                j = p[j]
                n += 1
            lengths.append(n)
    return tuple(sorted(lengths, reverse=True))


def perm_from_cycle_type(parts: Sequence[int]) -> Perm:
    """Permutation whose cycles run over consecutive blocks, e.g. (2,1) -> (1,0,2)."""
    out: List[int] = []
    start = 0
    for n in parts:
        block = list(range(start, start + n))
        out.extend(block[1:] + block[:1])
        start += n
    return tuple(out)


@lru_cache(maxsize=None)
def class_representatives(k: int) -> Tuple[Perm, ...]:
    """One permutation per conjugacy class of S_k, ordered lexicographically.

    For k=4 this is identity, transposition, 3-cycle, double transposition
    and 4-cycle.
    """
    reps = {perm_from_cycle_type(sorted(lam)) for lam in integer_partitions(k)}
    return tuple(sorted(reps))


def conjugate(p: Sequence[int], pi: Sequence[int]) -> Perm:
    """pi o p o pi^-1, i.e. the permutation p after relabelling i -> pi[i]."""
    return compose(pi, compose(p, inverse(pi)))


def parity(p: Sequence[int]) -> int:
    return sum(n - 1 for n in cycle_type(p)) % 2


def derangement_masks(k: int) -> List[int]:
    """mask[r] has bit q set when all_perms(k)[q] deranges all_perms(k)[r]."""
    ps = all_perms(k)
    out = []
    for r in ps:
        m = 0
        for q, p in enumerate(ps):
            if is_derangement_of(p, r):
                m |= 1 << q
        out.append(m)
    return out
