"""Exact rational linear programming by the two-phase simplex method.

Minimizes c.x subject to A x = b, x >= 0, over Fractions on a dense tableau.
Bland's smallest-index rule picks both the entering and the leaving variable,
which rules out cycling; every pivot is exact, so the reported optimum is the
true rational optimum.  Instances in this package are tiny (tens of columns),
so no effort is spent on sparsity.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import LPInternal

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class LPSolution:
    value: Fraction
    x: tuple[Fraction, ...]


def solve_lp(
    objective: Sequence[Fraction],
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
) -> LPSolution:
    """Minimize objective . x subject to rows . x = rhs, x >= 0.

    Raises LPInternal if the program is infeasible or unbounded; callers in
    this package only build feasible bounded programs, so either condition
    signals a bug.
    """
    n = len(objective)
    m = len(rows)
    tableau: list[list[Fraction]] = []
    for i in range(m):
        if len(rows[i]) != n:
            raise LPInternal("constraint row has wrong length")
        row = [Fraction(v) for v in rows[i]] + [Fraction(rhs[i])]
        if row[-1] < 0:
            row = [-v for v in row]
        tableau.append(row)

    # Phase 1: artificial variable j + n in row j, minimize their sum.
    for i in range(m):
        body = tableau[i][:n]
        art = [ONE if j == i else ZERO for j in range(m)]
        tableau[i] = body + art + [tableau[i][-1]]
    basis = [n + i for i in range(m)]
    cost1 = [ZERO] * n + [ONE] * m
    _optimize(tableau, basis, cost1)
    if _objective_value(tableau, basis, cost1) != 0:
        raise LPInternal("phase 1 ended positive: infeasible program")

    # Drive leftover artificials out of the basis, dropping redundant rows.
    keep: list[int] = []
    for i in range(m):
        if basis[i] < n:
            keep.append(i)
            continue
        pivot_col = next((j for j in range(n) if tableau[i][j] != 0), None)
        if pivot_col is None:
            continue  # redundant constraint
        _pivot(tableau, basis, i, pivot_col)
        keep.append(i)
    tableau = [[tableau[i][j] for j in range(n)] + [tableau[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]

    cost2 = [Fraction(v) for v in objective]
    _optimize(tableau, basis, cost2)
    x = [ZERO] * n
    for i, var in enumerate(basis):
        x[var] = tableau[i][-1]
    return LPSolution(_objective_value(tableau, basis, cost2), tuple(x))


def _reduced_costs(
    tableau: list[list[Fraction]], basis: list[int], cost: list[Fraction]
) -> list[Fraction]:
    width = len(tableau[0]) - 1
    reduced = list(cost[:width])
    for i, var in enumerate(basis):
        cb = cost[var]
        if cb == 0:
            continue
        row = tableau[i]
        for j in range(width):
            if row[j] != 0:
                reduced[j] -= cb * row[j]
    return reduced


def _objective_value(
    tableau: list[list[Fraction]], basis: list[int], cost: list[Fraction]
) -> Fraction:
    return sum((cost[var] * tableau[i][-1] for i, var in enumerate(basis)), ZERO)


def _optimize(
    tableau: list[list[Fraction]], basis: list[int], cost: list[Fraction]
) -> None:
    while True:
        reduced = _reduced_costs(tableau, basis, cost)
        entering = next((j for j, r in enumerate(reduced) if r < 0), None)
        if entering is None:
            return
        leaving_row = None
        best_ratio = None
        for i, row in enumerate(tableau):
            if row[entering] <= 0:
                continue
            ratio = row[-1] / row[entering]
            if (
                best_ratio is None
                or ratio < best_ratio
                or (ratio == best_ratio and basis[i] < basis[leaving_row])
            ):
                best_ratio = ratio
                leaving_row = i
        if leaving_row is None:
            raise LPInternal("unbounded program")
        _pivot(tableau, basis, leaving_row, entering)


def _pivot(
    tableau: list[list[Fraction]], basis: list[int], row: int, col: int
) -> None:
    pivot = tableau[row][col]
    if pivot == 0:
        raise LPInternal("zero pivot")
    tableau[row] = [v / pivot for v in tableau[row]]
    for i in range(len(tableau)):
        if i == row:
            continue
        factor = tableau[i][col]
        if factor == 0:
            continue
        tableau[i] = [v - factor * w for v, w in zip(tableau[i], tableau[row])]
    basis[row] = col
