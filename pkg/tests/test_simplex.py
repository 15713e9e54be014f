"""Exact rational simplex solver."""
from __future__ import annotations

import random
from fractions import Fraction

import pytest

from pmplab.errors import LPInternal
from pmplab.simplex import solve_lp

F = Fraction


def test_simple_bounded_minimum():
    # minimize x - y subject to x + y = 1
    sol = solve_lp([F(1), F(-1)], [[F(1), F(1)]], [F(1)])
    assert sol.value == -1
    assert sol.x == (F(0), F(1))


def test_transportation_instance():
    # optimal coupling of (1/2, 1/2) with (1/4, 3/4) charged off the diagonal
    objective = [F(0), F(1), F(1), F(0)]
    rows = [
        [F(1), F(1), F(0), F(0)],
        [F(0), F(0), F(1), F(1)],
        [F(1), F(0), F(1), F(0)],
        [F(0), F(1), F(0), F(1)],
    ]
    rhs = [F(1, 2), F(1, 2), F(1, 4), F(3, 4)]
    sol = solve_lp(objective, rows, rhs)
    assert sol.value == F(1, 4)


def test_degenerate_instance_terminates():
    # several redundant constraints force degenerate pivots; Bland's rule
    # must still reach the optimum
    objective = [F(1), F(1), F(1)]
    rows = [
        [F(1), F(1), F(0)],
        [F(1), F(1), F(0)],
        [F(0), F(0), F(1)],
    ]
    rhs = [F(0), F(0), F(0)]
    sol = solve_lp(objective, rows, rhs)
    assert sol.value == 0


def test_infeasible_raises():
    with pytest.raises(LPInternal):
        solve_lp([F(1)], [[F(1)], [F(1)]], [F(1), F(2)])


def test_unbounded_raises():
    # minimize -x with x free to grow: x - s = 0 keeps x unbounded above
    with pytest.raises(LPInternal):
        solve_lp([F(-1), F(0)], [[F(1), F(-1)]], [F(0)])


def test_solution_satisfies_constraints():
    rng = random.Random(13)
    for _ in range(30):
        n = rng.randint(2, 5)
        m = rng.randint(1, 3)
        rows = [[F(rng.randint(0, 4)) for _ in range(n)] for _ in range(m)]
        # build a right-hand side from a known feasible point so the program
        # is feasible by construction
        point = [F(rng.randint(0, 3)) for _ in range(n)]
        rhs = [sum(r[j] * point[j] for j in range(n)) for r in rows]
        objective = [F(rng.randint(1, 5)) for _ in range(n)]
        sol = solve_lp(objective, rows, rhs)
        assert all(v >= 0 for v in sol.x)
        for r, b in zip(rows, rhs):
            assert sum(rj * xj for rj, xj in zip(r, sol.x)) == b
        assert sol.value <= sum(
            objective[j] * point[j] for j in range(n)
        )
