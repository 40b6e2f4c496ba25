"""Exact phase-one simplex over ``fractions.Fraction``.

Decides feasibility of ``A x = b, x >= 0``.  Bland's rule guarantees
termination.  On infeasibility the final phase-one duals give a Farkas
certificate ``z`` with ``z^T A >= 0`` and ``z^T b < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass
class SimplexResult:
    feasible: bool
    x: list[Fraction] | None
    farkas: list[Fraction] | None
    residual: Fraction  # optimal phase-one objective


def feasible_point(A: list[list[Fraction]], b: list[Fraction]) -> SimplexResult:
    m = len(A)
    n = len(A[0]) if m else 0
    sign = [(-1 if bi < 0 else 1) for bi in b]
    # tableau rows: [x columns | artificial columns | rhs]
    T = []
    for i in range(m):
        row = [Fraction(sign[i] * a) for a in A[i]]
        row += [Fraction(1 if j == i else 0) for j in range(m)]
        row.append(Fraction(sign[i] * b[i]))
        T.append(row)
    basis = [n + i for i in range(m)]
    width = n + m
    # reduced costs for min sum(artificials); last entry is -objective
    r = [Fraction(0)] * (width + 1)
    for j in range(n):
        r[j] = -sum((T[i][j] for i in range(m)), Fraction(0))
    r[width] = -sum((T[i][width] for i in range(m)), Fraction(0))

    while True:
        enter = next((j for j in range(width) if r[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(m):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][width] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:  # unbounded direction; cannot happen for phase one
            raise ArithmeticError("phase-one simplex reported unbounded")
        _pivot(T, r, leave, enter)
        basis[leave] = enter

    residual = -r[width]
    if residual > 0:
        # y_i = 1 - reduced cost of artificial i; certificate z = -y, unflipped
        farkas = [-(1 - r[n + i]) * sign[i] for i in range(m)]
        return SimplexResult(False, None, farkas, residual)
    x = [Fraction(0)] * n
    for i, j in enumerate(basis):
        if j < n:
            x[j] = T[i][width]
    return SimplexResult(True, x, None, Fraction(0))


def _pivot(T, r, pr, pc):
    prow = T[pr]
    piv = prow[pc]
    if piv != 1:
        inv = 1 / piv
        prow[:] = [v * inv for v in prow]
    for i, row in enumerate(T):
        if i != pr:
            f = row[pc]
            if f:
                row[:] = [v - f * p for v, p in zip(row, prow)]
    f = r[pc]
    if f:
        r[:] = [v - f * p for v, p in zip(r, prow)]
