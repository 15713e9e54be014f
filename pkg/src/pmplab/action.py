"""Measure-preserving actions of a free group on a finite algebra.

An action is a list of k generator permutations of the atoms, each preserving
atom masses.  Words in the generators and their inverses act on events; the
uniform metric between two automorphisms is the largest mass by which they
disagree on any event, computed exactly from the cycle structure of their
quotient permutation.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable, Sequence

from .algebra import (
    ZERO,
    AtomPartition,
    Event,
    EventTuple,
    MeasuredAlgebra,
    _fresh_id,
    _sign_map,
    lift_tuple,
    product_algebra,
    refine_to_unit,
)
from .errors import (
    AlgebraMismatch,
    LetterOutOfRange,
    NonpositiveDelta,
    NotBijective,
    NotMeasurePreserving,
)

Perm = tuple[int, ...]


def perm_identity(n: int) -> Perm:
    return tuple(range(n))


def perm_compose(f: Perm, g: Perm) -> Perm:
    """The permutation x -> f(g(x))."""
    return tuple(f[g[x]] for x in range(len(f)))


def perm_inverse(p: Perm) -> Perm:
    out = [0] * len(p)
    for x, y in enumerate(p):
        out[y] = x
    return tuple(out)


def check_permutation(alg: MeasuredAlgebra, p: Sequence[int]) -> Perm:
    """Validate p as a mass-preserving permutation of the atoms of alg."""
    if len(p) != alg.size:
        raise NotBijective(f"permutation length {len(p)} != atom count {alg.size}")
    seen = [False] * alg.size
    for x, y in enumerate(p):
        if not 0 <= y < alg.size or seen[y]:
            raise NotBijective("generator table is not a permutation")
        seen[y] = True
    for x, y in enumerate(p):
        if alg.atoms[x] != alg.atoms[y]:
            raise NotMeasurePreserving(
                f"atom {x} (mass {alg.atoms[x]}) maps to atom {y} (mass {alg.atoms[y]})"
            )
    return tuple(p)


@dataclass(frozen=True)
class FkAction:
    """An action of the free group on k generators by atom permutations."""

    algebra: MeasuredAlgebra
    gens: tuple[Perm, ...]
    inv_gens: tuple[Perm, ...]

    @property
    def k(self) -> int:
        return len(self.gens)


def validate_action(alg: MeasuredAlgebra, gens: Sequence[Sequence[int]]) -> FkAction:
    """Check every generator and return the action with cached inverses."""
    checked = tuple(check_permutation(alg, g) for g in gens)
    return FkAction(alg, checked, tuple(perm_inverse(g) for g in checked))


@dataclass(frozen=True)
class Word:
    """A word in generators (positive letters) and inverses (negative letters).

    Letter i in 1..k names generator i; letter -i names its inverse.  The
    empty word is the identity.
    """

    letters: tuple[int, ...]

    @staticmethod
    def of(letters: Iterable[int]) -> Word:
        return Word(tuple(letters))


def letter_perm(act: FkAction, letter: int) -> Perm:
    if 1 <= letter <= act.k:
        return act.gens[letter - 1]
    if -act.k <= letter <= -1:
        return act.inv_gens[-letter - 1]
    raise LetterOutOfRange(f"letter {letter} is not in range for k = {act.k}")


def apply_perm_event(p: Perm, e: Event) -> Event:
    return Event(e.algebra, tuple(sorted(p[x] for x in e.members)))


def apply_word(act: FkAction, w: Word, e: Event) -> Event:
    """Apply the word to an event, rightmost letter first."""
    if e.algebra.id != act.algebra.id:
        raise AlgebraMismatch("event does not live on the action's algebra")
    out = e
    for letter in reversed(w.letters):
        out = apply_perm_event(letter_perm(act, letter), out)
    return out


def apply_gen_tuple(act: FkAction, i: int, t: EventTuple) -> EventTuple:
    """Apply generator i (1-based) to every event of a tuple."""
    p = letter_perm(act, i)
    return EventTuple(t.algebra, tuple(apply_perm_event(p, e) for e in t.events))


@dataclass(frozen=True)
class InvariantDecomposition:
    """Connected components of the atom graph drawn by all generators."""

    algebra: MeasuredAlgebra
    components: tuple[frozenset[int], ...]

    @property
    def ergodic(self) -> bool:
        return len(self.components) == 1

    def as_partition(self) -> AtomPartition:
        return AtomPartition(self.algebra, self.components)


def invariant_components(act: FkAction) -> InvariantDecomposition:
    """Orbit components of the atoms under all generators."""
    n = act.algebra.size
    seen = [False] * n
    components: list[frozenset[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        stack = [start]
        seen[start] = True
        comp = {start}
        while stack:
            x = stack.pop()
            for p in act.gens + act.inv_gens:
                y = p[x]
                if not seen[y]:
                    seen[y] = True
                    comp.add(y)
                    stack.append(y)
        components.append(frozenset(comp))
    return InvariantDecomposition(act.algebra, tuple(sorted(components, key=min)))


def generated_subalgebra(act: FkAction, events: EventTuple) -> AtomPartition:
    """Coarsest partition refining the seed partition of events and mapped
    onto itself by every generator.

    Computed as a partition-refinement fixpoint: split blocks by the block
    membership of their generator images until stable.  Its blocks are the
    atoms of the smallest action-invariant algebra containing the events.
    """
    if events.algebra.id != act.algebra.id:
        raise AlgebraMismatch("seed events do not live on the action's algebra")
    signs = _sign_map(events)
    groups: dict[tuple, set[int]] = {}
    for atom in range(act.algebra.size):
        groups.setdefault(signs[atom], set()).add(atom)
    blocks = sorted((frozenset(g) for g in groups.values()), key=min)
    while True:
        index: dict[int, int] = {}
        for i, b in enumerate(blocks):
            for atom in b:
                index[atom] = i
        split: dict[tuple[int, ...], set[int]] = {}
        for atom in range(act.algebra.size):
            key = (index[atom],) + tuple(index[p[atom]] for p in act.gens)
            split.setdefault(key, set()).add(atom)
        new_blocks = sorted((frozenset(g) for g in split.values()), key=min)
        if len(new_blocks) == len(blocks):
            return AtomPartition(act.algebra, tuple(blocks))
        blocks = new_blocks


def equal_refine_action(act: FkAction, m: int) -> tuple[FkAction, tuple[int, ...]]:
    """Refine every atom into m equal parts; generators act part-for-part."""
    from .algebra import refine_equal

    refined, projection = refine_equal(act.algebra, m)
    gens = []
    for p in act.gens:
        q = [0] * refined.size
        for x in range(act.algebra.size):
            for j in range(m):
                q[x * m + j] = p[x] * m + j
        gens.append(tuple(q))
    return validate_action(refined, gens), projection


def tensor_trivial(act: FkAction, factor: MeasuredAlgebra) -> FkAction:
    """Tensor with a trivial action: generators act on the first coordinate."""
    prod = product_algebra(act.algebra, factor)
    nb = factor.size
    gens = []
    for p in act.gens:
        q = [0] * prod.size
        for i in range(act.algebra.size):
            for j in range(nb):
                q[i * nb + j] = p[i] * nb + j
        gens.append(tuple(q))
    return validate_action(prod, gens)


def refine_action_to_unit(
    act: FkAction, unit: Fraction
) -> tuple[FkAction, tuple[int, ...]]:
    """Refine every atom into parts of the given unit mass; extend generators
    part-for-part.  The unit must divide every atom mass."""
    refined, projection = refine_to_unit(act.algebra, unit)
    starts: list[int] = []
    pos = 0
    for mass in act.algebra.atoms:
        starts.append(pos)
        pos += int(mass / unit)
    gens = []
    for p in act.gens:
        q = [0] * refined.size
        for x, mass in enumerate(act.algebra.atoms):
            count = int(mass / unit)
            for j in range(count):
                q[starts[x] + j] = starts[p[x]] + j
        gens.append(tuple(q))
    return validate_action(refined, gens), projection


def uniform_distance(alg: MeasuredAlgebra, g: Sequence[int], h: Sequence[int]) -> Fraction:
    """Largest mass by which g and h can disagree on an event.

    Equals the supremum over events e of the mass of g(e) triangle h(e),
    which reduces to the cycle structure of p = h^-1 g: every atom of a cycle
    has the same mass; an even cycle contributes its full mass, an odd cycle
    its mass minus one atom, and fixed points contribute nothing.
    """
    gp = check_permutation(alg, g)
    hp = check_permutation(alg, h)
    p = perm_compose(perm_inverse(hp), gp)
    seen = [False] * alg.size
    total = ZERO
    for start in range(alg.size):
        if seen[start]:
            continue
        cycle = [start]
        seen[start] = True
        x = p[start]
        while x != start:
            seen[x] = True
            cycle.append(x)
            x = p[x]
        if len(cycle) == 1:
            continue
        mass = alg.mass_of(cycle)
        if len(cycle) % 2 == 0:
            total += mass
        else:
            total += mass - min(alg.atoms[i] for i in cycle)
    return total


def uniform_distance_tuples(
    alg: MeasuredAlgebra, gs: Sequence[Sequence[int]], hs: Sequence[Sequence[int]]
) -> Fraction:
    """Uniform distance between automorphism tuples: the max over coordinates."""
    if len(gs) != len(hs):
        raise AlgebraMismatch("automorphism tuples have different lengths")
    best = ZERO
    for g, h in zip(gs, hs):
        d = uniform_distance(alg, g, h)
        if d > best:
            best = d
    return best


@dataclass(frozen=True)
class Perturbation:
    """A small automorphism of a refined algebra, fixing given blocks setwise.

    action is the input action extended to the refinement; s swaps, within
    every fixed block, two fresh sub-events of the recorded moved mass.
    """

    action: FkAction
    projection: tuple[int, ...]
    s: Perm
    moved: tuple[Fraction, ...]


def perturb_small(act: FkAction, fixed: AtomPartition, delta: Fraction) -> Perturbation:
    """Build a nontrivial automorphism moving less than delta in every block.

    For each block the moved mass is the largest blockmass / 2^j (j >= 1)
    strictly below delta.  The whole algebra is refined to a uniform unit so
    the generators extend part-for-part, and s swaps the first two runs of
    that mass inside each block; s is an involution, fixes every block
    setwise and is the identity nowhere on any block.
    """
    if fixed.algebra.id != act.algebra.id:
        raise AlgebraMismatch("fixed partition does not live on the action's algebra")
    if delta <= 0:
        raise NonpositiveDelta(f"delta must be positive, got {delta}")
    moved: list[Fraction] = []
    for i in range(len(fixed.blocks)):
        mass = fixed.block_mass(i)
        m = mass / 2
        while m >= delta:
            m = m / 2
        moved.append(m)
    unit_den = lcm(
        act.algebra.denominator_lcm(), *(m.denominator for m in moved)
    )
    unit = Fraction(1, unit_den)
    refined_act, projection = refine_action_to_unit(act, unit)
    positions: dict[int, list[int]] = {}
    for j, parent in enumerate(projection):
        positions.setdefault(parent, []).append(j)
    s = list(range(refined_act.algebra.size))
    for i, block in enumerate(fixed.blocks):
        units = [j for atom in sorted(block) for j in positions[atom]]
        t = int(moved[i] / unit)
        for a, b in zip(units[:t], units[t : 2 * t]):
            s[a], s[b] = s[b], s[a]
    return Perturbation(refined_act, projection, tuple(s), tuple(moved))


def relabel_action(act: FkAction, relabel: Sequence[int]) -> FkAction:
    """The same action after renaming atom i to relabel[i]."""
    n = act.algebra.size
    if sorted(relabel) != list(range(n)):
        raise NotBijective("relabeling is not a permutation")
    masses = [ZERO] * n
    for i in range(n):
        masses[relabel[i]] = act.algebra.atoms[i]
    alg = MeasuredAlgebra(_fresh_id(), tuple(masses))
    gens = []
    for p in act.gens:
        q = [0] * n
        for x in range(n):
            q[relabel[x]] = relabel[p[x]]
        gens.append(tuple(q))
    return validate_action(alg, gens)


def restrict_tuple_to_action(act: FkAction, t: EventTuple) -> EventTuple:
    """Re-home a tuple built on a structurally identical algebra."""
    if t.algebra.atoms != act.algebra.atoms:
        raise AlgebraMismatch("tuple algebra differs structurally from the action's")
    return EventTuple(
        act.algebra, tuple(Event(act.algebra, e.members) for e in t.events)
    )


def lift_tuple_to_action(
    t: EventTuple, refined_act: FkAction, projection: Sequence[int]
) -> EventTuple:
    return lift_tuple(t, refined_act.algebra, projection)
