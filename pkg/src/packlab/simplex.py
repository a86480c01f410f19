"""Exact rational simplex (fraction-free integer tableau).

Two entry points:

* ``feasible_point(A, b)`` finds x >= 0 with A x = b, or a Farkas vector y
  with y^T A <= 0 and y^T b > 0.
* ``maximize(c, A, b)`` solves max c^T x s.t. A x <= b, x >= 0 for b >= 0,
  returning primal and dual optimal solutions.

Rows are scaled to integers and pivoted Bareiss-style: the tableau holds
D * B^-1 [A | b] with D = det(B), so every division is exact and entries
stay small.  Dantzig's rule picks the entering column until a run of
degenerate pivots, after which Bland's rule guarantees termination.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import List, Optional, Sequence, Tuple

Q = Fraction
DEGENERATE_RUN = 50


class Unbounded(ArithmeticError):
    pass


def _frac_matrix(A) -> List[List[Fraction]]:
    return [[Q(x) for x in row] for row in A]


def _int_row(row: Sequence[Fraction]) -> Tuple[List[int], int]:
    s = lcm(*(x.denominator for x in row)) if row else 1
    return [int(x * s) for x in row], s


class Tableau:
    """rows[i] = [coefficients..., rhs] as integers over the common
    denominator ``den``; ``basis[i]`` is the basic column of row i.  The
    initial basis columns must be unit columns.  ``obj`` holds the reduced
    costs scaled by ``den * scale``, its last entry minus the objective."""

    def __init__(self, rows: List[List[int]], basis: List[int], cost: Sequence[Fraction]):
        self.rows = rows
        self.basis = basis
        self.ncols = len(rows[0]) - 1 if rows else 0
        self.den = 1
        self.pivots = 0
        cost = [Q(x) for x in cost]
        self.scale = lcm(*(x.denominator for x in cost)) if cost else 1
        obj = [int(x * self.scale) for x in cost] + [0]
        for i, b in enumerate(basis):
            cb = obj[b]
            if cb:
                obj = [x - cb * y for x, y in zip(obj, rows[i])]
        self.obj = obj

    def pivot(self, r: int, c: int) -> None:
        row = self.rows[r]
        p, d = row[c], self.den
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[c]
                if f:
                    self.rows[i] = [(a * p - f * b) // d for a, b in zip(other, row)]
                elif p != d:
                    self.rows[i] = [a * p // d for a in other]
        f = self.obj[c]
        self.obj = [(a * p - f * b) // d for a, b in zip(self.obj, row)]
        self.den = p
        self.basis[r] = c
        self.pivots += 1

    def reduced_costs(self) -> List[Fraction]:
        q = self.den * self.scale
        return [Q(x, q) for x in self.obj]  # last entry is -objective

    def minimize(self) -> None:
        """Primal simplex from the current feasible basis."""
        degenerate = 0
        while True:
            obj = self.obj
            enter = -1
            if degenerate < DEGENERATE_RUN:
                best = 0
                for j in range(self.ncols):
                    if obj[j] < best:
                        best, enter = obj[j], j
            else:
                for j in range(self.ncols):
                    if obj[j] < 0:
                        enter = j
                        break
            if enter < 0:
                return
            leave = -1
            num = den = 0
            for i, row in enumerate(self.rows):
                a = row[enter]
                if a > 0:
                    # compare row[-1] / a with num / den
                    if leave < 0:
                        better = True
                    else:
                        lhs, rhs = row[-1] * den, num * a
                        better = lhs < rhs or (lhs == rhs and self.basis[i] < self.basis[leave])
                    if better:
                        num, den, leave = row[-1], a, i
            if leave < 0:
                raise Unbounded("objective unbounded")
            if num == 0:
                degenerate += 1
            elif degenerate < DEGENERATE_RUN:
                degenerate = 0
            self.pivot(leave, enter)

    def solution(self) -> List[Fraction]:
        x = [Q(0)] * self.ncols
        for i, b in enumerate(self.basis):
            x[b] = Q(self.rows[i][-1], self.den)
        return x


@dataclass
class FeasibilityResult:
    feasible: bool
    x: Optional[List[Fraction]] = None
    farkas: Optional[List[Fraction]] = None  # y with y^T A <= 0, y^T b > 0
    pivots: int = 0


def feasible_point(A, b) -> FeasibilityResult:
    """Phase one of the two-phase method with one artificial per row."""
    A = _frac_matrix(A)
    b = [Q(x) for x in b]
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return FeasibilityResult(True, [Q(0)] * n)
    sign = [1 if bi >= 0 else -1 for bi in b]
    rows, scale = [], []
    for i in range(m):
        r, s = _int_row([sign[i] * a for a in A[i]] + [sign[i] * b[i]])
        art = [0] * m
        art[i] = 1
        rows.append(r[:-1] + art + r[-1:])
        scale.append(s)
    cost = [Q(0)] * n + [Q(1)] * m
    tab = Tableau(rows, [n + i for i in range(m)], cost)
    tab.minimize()
    d = tab.reduced_costs()
    value = -d[-1]
    if value > 0:
        # duals of the phase-one problem: pi_i = 1 - reduced cost of artificial i
        pi = [Q(1) - d[n + i] for i in range(m)]
        y = [sign[i] * scale[i] * pi[i] for i in range(m)]
        return FeasibilityResult(False, farkas=y, pivots=tab.pivots)
    x = tab.solution()[:n]
    return FeasibilityResult(True, x=x, pivots=tab.pivots)


def check_farkas(A, b, y) -> bool:
    """y^T A <= 0 componentwise and y^T b > 0 (exact)."""
    A = _frac_matrix(A)
    m = len(A)
    n = len(A[0]) if m else 0
    for j in range(n):
        if sum(y[i] * A[i][j] for i in range(m)) > 0:
            return False
    return sum(y[i] * Q(b[i]) for i in range(m)) > 0


@dataclass
class LPSolution:
    value: Fraction
    x: List[Fraction]
    dual: List[Fraction]
    pivots: int


def maximize(c, A, b) -> LPSolution:
    """max c^T x  s.t.  A x <= b, x >= 0, with b >= 0 (slack basis is feasible)."""
    A = _frac_matrix(A)
    b = [Q(x) for x in b]
    if any(x < 0 for x in b):
        raise ValueError("maximize needs b >= 0")
    m, n = len(A), len(c)
    rows, scale = [], []
    for i in range(m):
        r, s = _int_row(list(A[i]) + [b[i]])
        sl = [0] * m
        sl[i] = 1
        rows.append(r[:-1] + sl + r[-1:])
        scale.append(s)
    cost = [-Q(x) for x in c] + [Q(0)] * m
    tab = Tableau(rows, [n + i for i in range(m)], cost)
    tab.minimize()
    d = tab.reduced_costs()
    x = tab.solution()[:n]
    dual = [scale[i] * d[n + i] for i in range(m)]
    value = sum(Q(ci) * xi for ci, xi in zip(c, x))
    return LPSolution(value, x, dual, tab.pivots)
