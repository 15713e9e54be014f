"""Finite probability measure algebras with exact rational masses.

An algebra is a finite list of atoms indexed 0..n-1 whose Fraction masses are
positive and sum to one.  Events are sets of atom indices; tuples of events
generate sign-vector partitions, and every distance in this package is a sum
of cell masses of such partitions.  All arithmetic is exact; nothing here
touches floats.

Algebras have nominal identity: two algebras with identical atom lists are
still distinct objects, and events belonging to different algebras never
compare equal and may not be combined.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    AlgebraMismatch,
    ArityMismatch,
    MassNotOne,
    PartMassMismatch,
    ValidationError,
    ZeroAtom,
)

ZERO = Fraction(0)
ONE = Fraction(1)

Sign = tuple[int, ...]

_ids = itertools.count(1)


def _fresh_id() -> int:
    return next(_ids)


@dataclass(frozen=True)
class MeasuredAlgebra:
    """A finite measure algebra given by its atom masses.

    Construct through validate_algebra; internal operations that already
    guarantee the invariants build instances directly.  The id field gives
    each constructed algebra a distinct identity.
    """

    id: int
    atoms: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.atoms)

    def mass_of(self, members: Iterable[int]) -> Fraction:
        return sum((self.atoms[i] for i in members), ZERO)

    def denominator_lcm(self) -> int:
        return lcm(*(m.denominator for m in self.atoms))


def validate_algebra(masses: Sequence[Fraction]) -> MeasuredAlgebra:
    """Check atom masses and return a fresh algebra.

    Raises ZeroAtom for empty input or a nonpositive mass, MassNotOne when
    the total differs from one.
    """
    atoms = tuple(Fraction(m) for m in masses)
    if not atoms:
        raise ZeroAtom("an algebra needs at least one atom")
    for i, m in enumerate(atoms):
        if m <= 0:
            raise ZeroAtom(f"atom {i} has nonpositive mass {m}")
    total = sum(atoms, ZERO)
    if total != ONE:
        raise MassNotOne(f"atom masses sum to {total}, expected 1")
    return MeasuredAlgebra(_fresh_id(), atoms)


def _same_algebra(a: MeasuredAlgebra, b: MeasuredAlgebra, what: str) -> None:
    if a.id != b.id:
        raise AlgebraMismatch(f"{what} belong to different algebras")


@dataclass(frozen=True)
class Event(object):
    """A measurable set: a sorted duplicate-free tuple of atom indices."""

    algebra: MeasuredAlgebra
    members: tuple[int, ...]

    @staticmethod
    def of(algebra: MeasuredAlgebra, members: Iterable[int]) -> Event:
        ms = sorted(set(members))
        for i in ms:
            if not 0 <= i < algebra.size:
                raise ValidationError(
                    f"atom index {i} out of range for algebra of size {algebra.size}"
                )
        return Event(algebra, tuple(ms))

    @property
    def mass(self) -> Fraction:
        return self.algebra.mass_of(self.members)

    def complement(self) -> Event:
        inside = set(self.members)
        return Event(self.algebra, tuple(i for i in range(self.algebra.size) if i not in inside))

    def intersect(self, other: Event) -> Event:
        _same_algebra(self.algebra, other.algebra, "events")
        inside = set(other.members)
        return Event(self.algebra, tuple(i for i in self.members if i in inside))

    def union(self, other: Event) -> Event:
        _same_algebra(self.algebra, other.algebra, "events")
        return Event(self.algebra, tuple(sorted(set(self.members) | set(other.members))))

    def symmetric_difference(self, other: Event) -> Event:
        _same_algebra(self.algebra, other.algebra, "events")
        return Event(self.algebra, tuple(sorted(set(self.members) ^ set(other.members))))


@dataclass(frozen=True)
class EventTuple:
    """An ordered tuple of events over one algebra."""

    algebra: MeasuredAlgebra
    events: tuple[Event, ...]

    @staticmethod
    def of(algebra: MeasuredAlgebra, events: Iterable[Event]) -> EventTuple:
        evs = tuple(events)
        for e in evs:
            _same_algebra(algebra, e.algebra, "tuple events")
        return EventTuple(algebra, evs)

    @staticmethod
    def of_members(
        algebra: MeasuredAlgebra, memberses: Iterable[Iterable[int]]
    ) -> EventTuple:
        return EventTuple(
            algebra, tuple(Event.of(algebra, ms) for ms in memberses)
        )

    @property
    def arity(self) -> int:
        return len(self.events)

    def concat(self, other: EventTuple) -> EventTuple:
        _same_algebra(self.algebra, other.algebra, "tuples")
        return EventTuple(self.algebra, self.events + other.events)

    def signs_of(self, atom: int) -> Sign:
        """Membership vector of one atom: 1 in coordinate i iff atom is in event i."""
        return tuple(1 if atom in e.members else 0 for e in self.events)


def _member_sets(t: EventTuple) -> list[set[int]]:
    return [set(e.members) for e in t.events]


def _sign_map(t: EventTuple) -> list[Sign]:
    """Sign vector of every atom of the algebra, indexed by atom."""
    sets = _member_sets(t)
    return [tuple(1 if a in s else 0 for s in sets) for a in range(t.algebra.size)]


@dataclass(frozen=True)
class CellPartition:
    """The partition generated by an event tuple, indexed by sign vectors.

    cells maps every sign vector in {0,1}^arity to its atom set and mass;
    empty cells are retained with mass 0 so sign-vector indexing is total.
    """

    algebra: MeasuredAlgebra
    arity: int
    cells: Mapping[Sign, tuple[frozenset[int], Fraction]]

    def mass_of(self, sign: Sign) -> Fraction:
        return self.cells[sign][1]

    def nonzero_signs(self) -> list[Sign]:
        return [s for s in sorted(self.cells) if self.cells[s][1] > 0]


def generated_partition(t: EventTuple) -> CellPartition:
    """Cells of the partition generated by t.

    The cell of sign vector s is the intersection over i of event i (when
    s[i] = 1) or its complement (when s[i] = 0).  The empty tuple generates
    the single cell of mass one, keyed by the empty sign vector.
    """
    signs = _sign_map(t)
    groups: dict[Sign, set[int]] = {s: set() for s in itertools.product((0, 1), repeat=t.arity)}
    for atom, s in enumerate(signs):
        groups[s].add(atom)
    cells = {
        s: (frozenset(atoms), t.algebra.mass_of(atoms)) for s, atoms in groups.items()
    }
    return CellPartition(t.algebra, t.arity, cells)


@dataclass(frozen=True)
class JointDistribution:
    """Joint cell-mass law of a base tuple and a fiber tuple.

    mass holds only the cells of positive mass; absent keys mean zero.  Keys
    are (base sign, fiber sign) pairs.
    """

    base_arity: int
    fiber_arity: int
    mass: Mapping[tuple[Sign, Sign], Fraction]

    def mass_of(self, base_sign: Sign, fiber_sign: Sign) -> Fraction:
        return self.mass.get((base_sign, fiber_sign), ZERO)

    def base_marginal(self) -> dict[Sign, Fraction]:
        out: dict[Sign, Fraction] = {}
        for (r, _s), m in self.mass.items():
            out[r] = out.get(r, ZERO) + m
        return out

    def fiber_marginal(self) -> dict[Sign, Fraction]:
        out: dict[Sign, Fraction] = {}
        for (_r, s), m in self.mass.items():
            out[s] = out.get(s, ZERO) + m
        return out


def joint_distribution(base: EventTuple, fiber: EventTuple) -> JointDistribution:
    """Joint law of the two generated partitions, computed atom by atom."""
    _same_algebra(base.algebra, fiber.algebra, "base and fiber tuples")
    base_signs = _sign_map(base)
    fiber_signs = _sign_map(fiber)
    mass: dict[tuple[Sign, Sign], Fraction] = {}
    for atom in range(base.algebra.size):
        key = (base_signs[atom], fiber_signs[atom])
        mass[key] = mass.get(key, ZERO) + base.algebra.atoms[atom]
    mass = {k: m for k, m in mass.items() if m > 0}
    return JointDistribution(base.arity, fiber.arity, mass)


def dist_max(a: EventTuple, b: EventTuple) -> Fraction:
    """Max metric: the largest symmetric-difference mass over coordinates."""
    _same_algebra(a.algebra, b.algebra, "tuples")
    if a.arity != b.arity:
        raise ArityMismatch(f"tuples have arities {a.arity} and {b.arity}")
    best = ZERO
    for ea, eb in zip(a.events, b.events):
        d = ea.symmetric_difference(eb).mass
        if d > best:
            best = d
    return best


def dist_partition(a: EventTuple, b: EventTuple) -> Fraction:
    """Partition metric: half the summed symmetric-difference mass over cells.

    An atom whose sign vectors under a and b agree lies in matching cells and
    contributes nothing; a disagreeing atom contributes its mass at its a-sign
    and again at its b-sign.  The half-sum therefore equals the total mass of
    the atoms on which the two generated partitions disagree.
    """
    _same_algebra(a.algebra, b.algebra, "tuples")
    if a.arity != b.arity:
        raise ArityMismatch(f"tuples have arities {a.arity} and {b.arity}")
    sa = _sign_map(a)
    sb = _sign_map(b)
    return sum(
        (a.algebra.atoms[x] for x in range(a.algebra.size) if sa[x] != sb[x]), ZERO
    )


def refine_equal(alg: MeasuredAlgebra, m: int) -> tuple[MeasuredAlgebra, tuple[int, ...]]:
    """Split every atom into m equal parts.

    Part j of atom i becomes atom i*m + j.  Returns the refined algebra and
    the projection mapping each new atom to its parent.
    """
    if m < 1:
        raise PartMassMismatch(f"refinement factor must be >= 1, got {m}")
    atoms: list[Fraction] = []
    projection: list[int] = []
    for i, mass in enumerate(alg.atoms):
        part = mass / m
        for _ in range(m):
            atoms.append(part)
            projection.append(i)
    return MeasuredAlgebra(_fresh_id(), tuple(atoms)), tuple(projection)


def refine_atom(
    alg: MeasuredAlgebra, atom: int, parts: Sequence[Fraction]
) -> tuple[MeasuredAlgebra, tuple[int, ...]]:
    """Replace one atom by the given parts, in place.

    The parts must be positive and sum to the atom's mass; other atoms keep
    their order.  Returns the refined algebra and the new-to-old projection.
    """
    if not 0 <= atom < alg.size:
        raise PartMassMismatch(f"no atom {atom} in algebra of size {alg.size}")
    ps = tuple(Fraction(p) for p in parts)
    if not ps or any(p <= 0 for p in ps):
        raise PartMassMismatch("parts must be nonempty and positive")
    if sum(ps, ZERO) != alg.atoms[atom]:
        raise PartMassMismatch(
            f"parts sum to {sum(ps, ZERO)}, atom {atom} has mass {alg.atoms[atom]}"
        )
    atoms: list[Fraction] = []
    projection: list[int] = []
    for i, mass in enumerate(alg.atoms):
        if i == atom:
            atoms.extend(ps)
            projection.extend([i] * len(ps))
        else:
            atoms.append(mass)
            projection.append(i)
    return MeasuredAlgebra(_fresh_id(), tuple(atoms)), tuple(projection)


def refine_to_unit(
    alg: MeasuredAlgebra, unit: Fraction
) -> tuple[MeasuredAlgebra, tuple[int, ...]]:
    """Split every atom into parts of the given unit mass.

    The unit must divide every atom mass exactly.
    """
    atoms: list[Fraction] = []
    projection: list[int] = []
    for i, mass in enumerate(alg.atoms):
        count = mass / unit
        if count.denominator != 1 or count < 1:
            raise PartMassMismatch(f"unit {unit} does not divide atom mass {mass}")
        atoms.extend([unit] * int(count))
        projection.extend([i] * int(count))
    return MeasuredAlgebra(_fresh_id(), tuple(atoms)), tuple(projection)


def refine_to_units(alg: MeasuredAlgebra) -> tuple[MeasuredAlgebra, tuple[int, ...]]:
    """Split every atom into equal atoms of mass 1/lcm(denominators)."""
    return refine_to_unit(alg, Fraction(1, alg.denominator_lcm()))


def lift_event(e: Event, refined: MeasuredAlgebra, projection: Sequence[int]) -> Event:
    """Pull an event back along a refinement projection."""
    inside = set(e.members)
    return Event(refined, tuple(j for j, parent in enumerate(projection) if parent in inside))


def lift_tuple(
    t: EventTuple, refined: MeasuredAlgebra, projection: Sequence[int]
) -> EventTuple:
    return EventTuple(refined, tuple(lift_event(e, refined, projection) for e in t.events))


def product_algebra(a: MeasuredAlgebra, b: MeasuredAlgebra) -> MeasuredAlgebra:
    """Product measure algebra, atom (i, j) at index i * b.size + j."""
    atoms = tuple(ma * mb for ma in a.atoms for mb in b.atoms)
    return MeasuredAlgebra(_fresh_id(), atoms)


@dataclass(frozen=True)
class AtomPartition:
    """A plain partition of the atoms into blocks.

    Blocks are canonically ordered by least member.  This is the currency of
    invariant decompositions, generated subalgebras and fixed subalgebras;
    unlike CellPartition it carries no sign-vector indexing.
    """

    algebra: MeasuredAlgebra
    blocks: tuple[frozenset[int], ...]

    @staticmethod
    def of(algebra: MeasuredAlgebra, blocks: Iterable[Iterable[int]]) -> AtomPartition:
        bs = [frozenset(b) for b in blocks]
        seen: set[int] = set()
        for b in bs:
            if not b:
                raise PartMassMismatch("partition blocks must be nonempty")
            if b & seen:
                raise PartMassMismatch("partition blocks overlap")
            seen |= b
        if seen != set(range(algebra.size)):
            raise PartMassMismatch("partition blocks must cover all atoms")
        return AtomPartition(algebra, tuple(sorted(bs, key=min)))

    @staticmethod
    def trivial(algebra: MeasuredAlgebra) -> AtomPartition:
        return AtomPartition(algebra, (frozenset(range(algebra.size)),))

    @staticmethod
    def discrete(algebra: MeasuredAlgebra) -> AtomPartition:
        return AtomPartition(algebra, tuple(frozenset((i,)) for i in range(algebra.size)))

    def block_of(self, atom: int) -> frozenset[int]:
        for b in self.blocks:
            if atom in b:
                return b
        raise KeyError(atom)

    def block_index(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for i, b in enumerate(self.blocks):
            for atom in b:
                out[atom] = i
        return out

    def block_mass(self, i: int) -> Fraction:
        return self.algebra.mass_of(self.blocks[i])


def signs_iter(arity: int) -> Iterator[Sign]:
    """All sign vectors of the given arity in lexicographic order."""
    return itertools.product((0, 1), repeat=arity)
