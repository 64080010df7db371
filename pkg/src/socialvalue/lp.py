"""Exact rational feasibility for ``A x = b, x >= 0``.

Phase one of the tableau simplex method with Bland's rule, so it terminates
without anti-cycling perturbations and never rounds.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def _pivot(tableau: list[list[Fraction]], row: int, col: int) -> None:
    pivot_row = tableau[row]
    piv = pivot_row[col]
    if piv != 1:
        tableau[row] = pivot_row = [v / piv for v in pivot_row]
    for r, line in enumerate(tableau):
        if r == row:
            continue
        f = line[col]
        if f:
            tableau[r] = [v - f * p for v, p in zip(line, pivot_row)]


def feasible_point(A: Sequence[Sequence], b: Sequence) -> list[Fraction] | None:
    """Return a vertex ``x >= 0`` with ``A x = b``, or None when infeasible."""
    m = len(A)
    n = len(A[0]) if m else 0
    if m == 0:
        return [Fraction(0)] * n
    tableau = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            row, rhs = [-v for v in row], -rhs
        tableau.append(row + [Fraction(int(j == i)) for j in range(m)] + [rhs])
    # objective row: reduced costs of "minimize the sum of artificials"
    width = n + m + 1
    obj = [Fraction(0)] * width
    for line in tableau:
        for j in range(n):
            obj[j] -= line[j]
        obj[-1] -= line[-1]
    tableau.append(obj)
    basis = [n + i for i in range(m)]

    while True:
        obj = tableau[-1]
        col = next((j for j in range(n + m) if obj[j] < 0), None)
        if col is None:
            break
        best = None
        for i in range(m):
            a = tableau[i][col]
            if a > 0:
                ratio = tableau[i][-1] / a
                if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                    best = (ratio, i)
        if best is None:  # unbounded direction cannot occur in phase one
            break
        _pivot(tableau, best[1], col)
        basis[best[1]] = col

    if tableau[-1][-1] != 0:
        return None
    x = [Fraction(0)] * n
    for i, var in enumerate(basis):
        if var < n:
            x[var] = tableau[i][-1]
    return x
