"""Distances between types over a base and conditional independence.

The type of a fiber tuple over a base tuple is its joint cell-mass law with
the base partition.  Two types at distance zero are equidistributed over the
base; positive distances measure how far any realization of one must be from
the other.  Two metrics are provided: a total-variation form with a closed
formula, and a max-coordinate form computed by an exact rational linear
program over couplings.  Conditional independence is measured as the
total-variation gap to the relatively independent joining.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterator, Mapping, Sequence

from .algebra import (
    ZERO,
    EventTuple,
    JointDistribution,
    Sign,
    _same_algebra,
    _sign_map,
    generated_partition,
    joint_distribution,
)
from .errors import ArityMismatch, InstanceTooLarge, LPInternal, NonpositiveEps
from .simplex import solve_lp


def joint_tv_distance(j1: JointDistribution, j2: JointDistribution) -> Fraction:
    """Total-variation distance between two joint distributions.

    The distributions may come from different algebras; only the sign-keyed
    mass maps are compared, so base and fiber arities must agree."""
    if j1.base_arity != j2.base_arity or j1.fiber_arity != j2.fiber_arity:
        raise ArityMismatch("joint distributions have different shapes")
    keys = set(j1.mass) | set(j2.mass)
    total = sum(
        (abs(j1.mass.get(k, ZERO) - j2.mass.get(k, ZERO)) for k in keys), ZERO
    )
    return total / 2


def type_distance_tv(base: EventTuple, b: EventTuple, c: EventTuple) -> Fraction:
    """Total-variation distance between the types of b and c over base.

    Equals half the summed absolute difference of the two joint laws, i.e.
    the least partition-metric distance between c and any tuple realizing
    the type of b over the base.
    """
    _check_triple(base, b, c)
    return joint_tv_distance(joint_distribution(base, b), joint_distribution(base, c))


def type_distance_max(base: EventTuple, b: EventTuple, c: EventTuple) -> Fraction:
    """Max-metric distance between the types of b and c over base.

    The least value of max_i mu(b'_i triangle c_i) over tuples b' with the
    joint law of b over the base, found by an exact simplex over per-cell
    couplings: one coupling per base cell with the two conditional laws as
    margins, minimizing the largest per-coordinate mismatch mass.
    """
    _check_triple(base, b, c)
    n = b.arity
    if n == 0:
        return ZERO
    jb = joint_distribution(base, b)
    jc = joint_distribution(base, c)
    cells = sorted(jb.base_marginal())

    var_index: dict[tuple[Sign, Sign, Sign], int] = {}
    for r in cells:
        for s in _fiber_support(jb, r):
            for t in _fiber_support(jc, r):
                var_index[(r, s, t)] = len(var_index)
    z_index = len(var_index)
    slack_base = z_index + 1
    width = slack_base + n

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for r in cells:
        for s in _fiber_support(jb, r):
            row = [ZERO] * width
            for t in _fiber_support(jc, r):
                row[var_index[(r, s, t)]] = Fraction(1)
            rows.append(row)
            rhs.append(jb.mass_of(r, s))
        for t in _fiber_support(jc, r):
            row = [ZERO] * width
            for s in _fiber_support(jb, r):
                row[var_index[(r, s, t)]] = Fraction(1)
            rows.append(row)
            rhs.append(jc.mass_of(r, t))
    for i in range(n):
        row = [ZERO] * width
        for (r, s, t), j in var_index.items():
            if s[i] != t[i]:
                row[j] = Fraction(1)
        row[z_index] = Fraction(-1)
        row[slack_base + i] = Fraction(1)
        rows.append(row)
        rhs.append(ZERO)

    objective = [ZERO] * width
    objective[z_index] = Fraction(1)
    solution = solve_lp(objective, rows, rhs)
    if solution.value < 0:
        raise LPInternal("coupling program returned a negative distance")
    return solution.value


def _fiber_support(joint: JointDistribution, r: Sign) -> list[Sign]:
    return sorted(s for (rr, s) in joint.mass if rr == r)


def _check_triple(base: EventTuple, b: EventTuple, c: EventTuple) -> None:
    _same_algebra(base.algebra, b.algebra, "base and fiber tuples")
    _same_algebra(base.algebra, c.algebra, "base and fiber tuples")
    if b.arity != c.arity:
        raise ArityMismatch(f"fiber tuples have arities {b.arity} and {c.arity}")


@dataclass(frozen=True)
class TripleDistribution:
    """Joint cell-mass law over base x mid x fiber sign vectors.

    Keys are (base sign r, mid sign t, fiber sign s); absent keys mean zero.
    """

    base_arity: int
    mid_arity: int
    fiber_arity: int
    mass: Mapping[tuple[Sign, Sign, Sign], Fraction]

    def mass_of(self, r: Sign, t: Sign, s: Sign) -> Fraction:
        return self.mass.get((r, t, s), ZERO)


def triple_law(base: EventTuple, mid: EventTuple, fiber: EventTuple) -> TripleDistribution:
    """Actual joint law of three tuples, computed atom by atom."""
    _same_algebra(base.algebra, mid.algebra, "tuples")
    _same_algebra(base.algebra, fiber.algebra, "tuples")
    rs = _sign_map(base)
    ts = _sign_map(mid)
    ss = _sign_map(fiber)
    mass: dict[tuple[Sign, Sign, Sign], Fraction] = {}
    for atom in range(base.algebra.size):
        key = (rs[atom], ts[atom], ss[atom])
        mass[key] = mass.get(key, ZERO) + base.algebra.atoms[atom]
    return TripleDistribution(
        base.arity, mid.arity, fiber.arity, {k: m for k, m in mass.items() if m > 0}
    )


def relatively_independent_joining(
    base: EventTuple, b: EventTuple, c: EventTuple
) -> TripleDistribution:
    """The joining coupling b and c independently over each base cell:

        mass(r, t, s) = mass(r, t) * mass(r, s) / mass(r).

    Base cells of mass zero contribute nothing.
    """
    _same_algebra(base.algebra, b.algebra, "tuples")
    _same_algebra(base.algebra, c.algebra, "tuples")
    jb = joint_distribution(base, b)
    jc = joint_distribution(base, c)
    base_masses = jb.base_marginal()
    mass: dict[tuple[Sign, Sign, Sign], Fraction] = {}
    for (r, s), mb in jb.mass.items():
        for t in _fiber_support(jc, r):
            m = mb * jc.mass_of(r, t) / base_masses[r]
            if m > 0:
                mass[(r, t, s)] = m
    return TripleDistribution(base.arity, c.arity, b.arity, mass)


def independence_deficiency(
    base: EventTuple, b: EventTuple, c: EventTuple
) -> Fraction:
    """Total-variation distance between the actual joint law of
    (base, c, b) and the relatively independent joining; zero exactly when
    b and c are conditionally independent over the base partition."""
    actual = triple_law(base, c, b).mass
    joined = relatively_independent_joining(base, b, c).mass
    keys = set(actual) | set(joined)
    total = sum((abs(actual.get(k, ZERO) - joined.get(k, ZERO)) for k in keys), ZERO)
    return total / 2


def eps_independent(
    base: EventTuple, b: EventTuple, c: EventTuple, eps: Fraction
) -> bool:
    """Strict test: deficiency < eps.  eps must be positive."""
    if eps <= 0:
        raise NonpositiveEps(f"eps must be positive, got {eps}")
    return independence_deficiency(base, b, c) < eps


def oracle_type_distance(
    base: EventTuple,
    b: EventTuple,
    c: EventTuple,
    grid: int,
    metric: str = "tv",
) -> Fraction:
    """Brute-force upper bound on a type distance by coupling enumeration.

    Enumerates, per base cell, every coupling of the two conditional laws
    whose entries are multiples of 1 / (grid * lcm of mass denominators),
    and minimizes the chosen metric over all combinations.  Margins are
    always on the grid, so the bound is valid for every grid and converges
    to the true distance as the grid is refined; for the tv metric it is
    exact once the grid resolves the optimal overlap coupling.

    Only small instances are accepted: at most 3 nonempty base cells, fiber
    arity at most 2, grid at most 64.
    """
    if grid < 1:
        raise ValueError(f"grid must be >= 1, got {grid}")
    if grid > 64:
        raise InstanceTooLarge(f"grid {grid} exceeds the oracle bound 64")
    if metric not in ("tv", "max"):
        raise ValueError(f"unknown metric {metric!r}")
    _check_triple(base, b, c)
    n = b.arity
    if n > 2:
        raise InstanceTooLarge(f"fiber arity {n} exceeds the oracle bound 2")
    cells = generated_partition(base).nonzero_signs()
    if len(cells) > 3:
        raise InstanceTooLarge(f"{len(cells)} base cells exceed the oracle bound 3")
    if n == 0:
        return ZERO

    jb = joint_distribution(base, b)
    jc = joint_distribution(base, c)
    denominators = [m.denominator for m in itertools.chain(jb.mass.values(), jc.mass.values())]
    step = Fraction(1, grid * lcm(*denominators))

    per_cell: list[list[tuple[Sign, Sign, tuple[int, ...]]]] = []
    for r in cells:
        ss = _fiber_support(jb, r)
        ts = _fiber_support(jc, r)
        row_units = [int(jb.mass_of(r, s) / step) for s in ss]
        col_units = [int(jc.mass_of(r, t) / step) for t in ts]
        tables = list(_tables(row_units, col_units))
        per_cell.append([(ss, ts, table) for table in tables])

    if metric == "tv":
        total = ZERO
        for options in per_cell:
            best = None
            for ss, ts, table in options:
                mism = 0
                for i, s in enumerate(ss):
                    for j, t in enumerate(ts):
                        if s != t:
                            mism += table[i * len(ts) + j]
                if best is None or mism < best:
                    best = mism
            total += best * step
        return total

    combos = 1
    for options in per_cell:
        combos *= len(options)
        if combos > 2_000_000:
            raise InstanceTooLarge("too many couplings to enumerate")
    best_value = None
    for choice in itertools.product(*per_cell):
        coord = [0] * n
        for ss, ts, table in choice:
            for i, s in enumerate(ss):
                for j, t in enumerate(ts):
                    units = table[i * len(ts) + j]
                    if units == 0:
                        continue
                    for x in range(n):
                        if s[x] != t[x]:
                            coord[x] += units
        value = max(coord)
        if best_value is None or value < best_value:
            best_value = value
    return best_value * step


def _tables(rows: Sequence[int], cols: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All nonnegative integer matrices with the given row and column sums,
    flattened row-major.  Row and column totals must agree."""
    if sum(rows) != sum(cols):
        raise LPInternal("margins disagree")
    ncols = len(cols)

    def rec(row_idx: int, remaining_cols: tuple[int, ...], acc: list[int]):
        if row_idx == len(rows):
            yield tuple(acc)
            return
        target = rows[row_idx]
        for combo in _compositions(target, remaining_cols):
            new_cols = tuple(rc - v for rc, v in zip(remaining_cols, combo))
            acc.extend(combo)
            yield from rec(row_idx + 1, new_cols, acc)
            del acc[len(acc) - ncols :]

    yield from rec(0, tuple(cols), [])


def _compositions(total: int, caps: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
    """All ways to write total as an ordered sum bounded by caps."""
    if len(caps) == 1:
        if total <= caps[0]:
            yield (total,)
        return
    head_cap = min(caps[0], total)
    rest = caps[1:]
    rest_cap = sum(rest)
    lo = max(0, total - rest_cap)
    for v in range(lo, head_cap + 1):
        for tail in _compositions(total - v, rest):
            yield (v,) + tail
