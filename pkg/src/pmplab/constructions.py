"""Constructive kernels: partition matching, extension of partial
automorphisms, ergodization, quotient actions of marked groups and
embeddings into them, and approximate conjugacy search.

Everything here returns explicit witnesses (permutations, refined algebras,
block correspondences) whose claimed properties can be re-verified exactly
with the metrics from the algebra and action modules.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Optional, Sequence

from .algebra import (
    ZERO,
    AtomPartition,
    Event,
    EventTuple,
    MeasuredAlgebra,
    _fresh_id,
    _sign_map,
    dist_partition,
    generated_partition,
    lift_tuple,
    validate_algebra,
)
from .action import (
    FkAction,
    Perm,
    apply_perm_event,
    invariant_components,
    perm_compose,
    perm_identity,
    perm_inverse,
    refine_action_to_unit,
    tensor_trivial,
    uniform_distance,
    validate_action,
)
from .errors import (
    AlgebraMismatch,
    ArityMismatch,
    BoundViolated,
    InvalidGroupTable,
    LPInternal,
    NotBijective,
    NotGenerating,
    NotMassPreserving,
    NotTransitive,
    PartitionNotPreserved,
    PreconditionInvariantElement,
    TypeMismatch,
    UnequalAtoms,
)

# ---------------------------------------------------------------------------
# block correspondences


@dataclass(frozen=True)
class PartialIsomorphism:
    """A partial mass-preserving correspondence given by block pairs.

    Source blocks are pairwise disjoint atom sets of the source algebra,
    target blocks likewise in the target algebra, and paired blocks have
    equal mass.  A total correspondence whose source blocks are singletons
    covering the source acts as an embedding.
    """

    source: MeasuredAlgebra
    target: MeasuredAlgebra
    pairs: tuple[tuple[frozenset[int], frozenset[int]], ...]

    @staticmethod
    def of(
        source: MeasuredAlgebra,
        target: MeasuredAlgebra,
        pairs: Sequence[tuple[Sequence[int], Sequence[int]]],
    ) -> PartialIsomorphism:
        seen_src: set[int] = set()
        seen_tgt: set[int] = set()
        out = []
        for src, tgt in pairs:
            fs, ft = frozenset(src), frozenset(tgt)
            if not all(0 <= i < source.size for i in fs):
                raise AlgebraMismatch("source block out of range")
            if not all(0 <= i < target.size for i in ft):
                raise AlgebraMismatch("target block out of range")
            if fs & seen_src or ft & seen_tgt:
                raise NotMassPreserving("blocks of a partial isomorphism overlap")
            seen_src |= fs
            seen_tgt |= ft
            if source.mass_of(fs) != target.mass_of(ft):
                raise NotMassPreserving(
                    f"block masses differ: {source.mass_of(fs)} vs {target.mass_of(ft)}"
                )
            out.append((fs, ft))
        return PartialIsomorphism(source, target, tuple(out))

    def source_events(self) -> EventTuple:
        return EventTuple(
            self.source,
            tuple(Event(self.source, tuple(sorted(s))) for s, _ in self.pairs),
        )

    def target_events(self) -> EventTuple:
        return EventTuple(
            self.target,
            tuple(Event(self.target, tuple(sorted(t))) for _, t in self.pairs),
        )

    def atom_blocks(self) -> dict[int, frozenset[int]]:
        """Source-atom to target-block map; requires singleton source blocks."""
        out: dict[int, frozenset[int]] = {}
        for src, tgt in self.pairs:
            if len(src) != 1:
                raise NotMassPreserving("source blocks are not singletons")
            out[next(iter(src))] = tgt
        return out

    def map_event(self, e: Event) -> Event:
        """Image of an event that is a union of source blocks."""
        members = set(e.members)
        image: set[int] = set()
        for src, tgt in self.pairs:
            if src <= members:
                image |= tgt
                members -= src
        if members:
            raise AlgebraMismatch("event is not a union of source blocks")
        return Event(self.target, tuple(sorted(image)))

    def map_tuple(self, t: EventTuple) -> EventTuple:
        return EventTuple(self.target, tuple(self.map_event(e) for e in t.events))


@dataclass(frozen=True)
class Isomorphism:
    """A total atom-to-atom mass-preserving bijection between two algebras."""

    source: MeasuredAlgebra
    target: MeasuredAlgebra
    mapping: tuple[int, ...]

    @staticmethod
    def of(
        source: MeasuredAlgebra, target: MeasuredAlgebra, mapping: Sequence[int]
    ) -> Isomorphism:
        if source.size != target.size or sorted(mapping) != list(range(source.size)):
            raise NotBijective("mapping is not a bijection between the atom sets")
        for x, y in enumerate(mapping):
            if source.atoms[x] != target.atoms[y]:
                raise NotMassPreserving(
                    f"atom {x} of mass {source.atoms[x]} maps to mass {target.atoms[y]}"
                )
        return Isomorphism(source, target, tuple(mapping))


# ---------------------------------------------------------------------------
# partition matching


@dataclass(frozen=True)
class Matching:
    """An automorphism realizing the partition-metric bound between two
    equidistributed tuples.

    perm acts on refined, maps the lifted a to the lifted b event by event,
    moves only atoms where the two sign maps disagree, and satisfies
    uniform_distance(perm, id) <= dp = dist_partition(a, b)."""

    refined: MeasuredAlgebra
    projection: tuple[int, ...]
    perm: Perm
    dp: Fraction
    a_lifted: EventTuple
    b_lifted: EventTuple


def match_partitions(a: EventTuple, b: EventTuple) -> Matching:
    """Build an automorphism g of a refinement with g(a) = b eventwise.

    Requires a and b equidistributed (equal cell-mass vectors).  Every atom
    on which the sign maps of a and b disagree is split into equal-mass
    rational fragments of one global unit; within each sign vector s the
    fragments leaving cell s under a are paired lexicographically with those
    entering cell s under b, and all other atoms stay fixed.  The pairing
    moves exactly the disagreement mass, so the uniform distance of g from
    the identity is at most dist_partition(a, b)."""
    if a.algebra.id != b.algebra.id:
        raise AlgebraMismatch("tuples live on different algebras")
    if a.arity != b.arity:
        raise ArityMismatch(f"tuples have arities {a.arity} and {b.arity}")
    pa = generated_partition(a)
    pb = generated_partition(b)
    masses_a = {s: c[1] for s, c in pa.cells.items()}
    masses_b = {s: c[1] for s, c in pb.cells.items()}
    if masses_a != masses_b:
        raise TypeMismatch("tuples are not equidistributed: cell masses differ")

    alg = a.algebra
    sa = _sign_map(a)
    sb = _sign_map(b)
    moving = [x for x in range(alg.size) if sa[x] != sb[x]]
    dp = sum((alg.atoms[x] for x in moving), ZERO)

    if moving:
        unit = Fraction(1, lcm(*(alg.atoms[x].denominator for x in moving)))
    else:
        unit = Fraction(1)
    atoms: list[Fraction] = []
    projection: list[int] = []
    fragments: dict[int, list[int]] = {}
    moving_set = set(moving)
    for x, mass in enumerate(alg.atoms):
        if x in moving_set:
            count = int(mass / unit)
            fragments[x] = list(range(len(atoms), len(atoms) + count))
            atoms.extend([unit] * count)
            projection.extend([x] * count)
        else:
            projection.append(x)
            atoms.append(mass)
    refined = MeasuredAlgebra(_fresh_id(), tuple(atoms))

    perm = list(range(refined.size))
    for s in sorted(masses_a):
        leaving = [f for x in moving if sa[x] == s for f in fragments[x]]
        entering = [f for x in moving if sb[x] == s for f in fragments[x]]
        if len(leaving) != len(entering):
            raise LPInternal("fragment counts disagree within a sign vector")
        for src, tgt in zip(leaving, entering):
            perm[src] = tgt

    a_lifted = lift_tuple(a, refined, projection)
    b_lifted = lift_tuple(b, refined, projection)
    g = tuple(perm)
    for ea, eb in zip(a_lifted.events, b_lifted.events):
        if apply_perm_event(g, ea).members != eb.members:
            raise LPInternal("matching permutation does not carry a onto b")
    return Matching(refined, tuple(projection), g, dp, a_lifted, b_lifted)


@dataclass(frozen=True)
class PartialExtension:
    """Result of one extension step: the grown correspondence, the target
    refinement it lives on, and the (unchanged) partition-metric defect."""

    partial: PartialIsomorphism
    refined: MeasuredAlgebra
    projection: tuple[int, ...]
    defect: Fraction


def extend_partial_step(
    alg: MeasuredAlgebra,
    g: Perm,
    p: PartialIsomorphism,
    newsource: Event,
    bound: Fraction,
) -> PartialExtension:
    """Extend a partial correspondence by one source block.

    p maps source blocks b to target blocks c inside the one ambient algebra
    alg; g is an ambient automorphism with dist_partition(g(b), c) < bound.
    A matching automorphism h carrying g(b) onto c exactly is built on a
    refinement, and the new target is h(g(newsource)).  The extended
    correspondence has exactly equal cell masses and the same defect, so the
    strict bound is preserved."""
    if p.source.id != alg.id or p.target.id != alg.id:
        raise AlgebraMismatch("partial correspondence must live on the ambient algebra")
    if newsource.algebra.id != alg.id:
        raise AlgebraMismatch("new source block must live on the ambient algebra")
    b = p.source_events()
    c = p.target_events()
    gb = EventTuple(alg, tuple(apply_perm_event(g, e) for e in b.events))
    defect = dist_partition(gb, c)
    if defect >= bound:
        raise BoundViolated(f"current defect {defect} is not below the bound {bound}")
    matching = match_partitions(gb, c)
    g_new = apply_perm_event(g, newsource)
    g_new_lifted = Event(
        matching.refined,
        tuple(
            j
            for j, parent in enumerate(matching.projection)
            if parent in set(g_new.members)
        ),
    )
    new_target = apply_perm_event(matching.perm, g_new_lifted)
    pairs = [
        (tuple(src), tuple(lift_members(tgt, matching.projection)))
        for src, tgt in p.pairs
    ]
    pairs.append((tuple(newsource.members), tuple(new_target.members)))
    extended = PartialIsomorphism.of(alg, matching.refined, pairs)
    return PartialExtension(extended, matching.refined, matching.projection, defect)


def lift_members(members: frozenset[int], projection: Sequence[int]) -> list[int]:
    return [j for j, parent in enumerate(projection) if parent in members]


# ---------------------------------------------------------------------------
# marked groups


@dataclass(frozen=True)
class MarkedGroup:
    """A finite group with a multiplication table and k marked generators.

    Element 0-based indices; mul[a][b] is the product ab; gen_images must
    generate the whole group."""

    order: int
    mul: tuple[tuple[int, ...], ...]
    identity: int
    gen_images: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.gen_images)

    def inverse(self, x: int) -> int:
        row = self.mul[x]
        for y in range(self.order):
            if row[y] == self.identity:
                return y
        raise InvalidGroupTable(f"element {x} has no inverse")


def validate_marked_group(
    mul: Sequence[Sequence[int]], gen_images: Sequence[int]
) -> MarkedGroup:
    """Full check: table shape, identity, inverses, associativity, generation."""
    order = len(mul)
    if order == 0:
        raise InvalidGroupTable("empty multiplication table")
    table = tuple(tuple(row) for row in mul)
    for row in table:
        if len(row) != order or any(not 0 <= v < order for v in row):
            raise InvalidGroupTable("multiplication table is not square over the elements")
    identity = None
    for e in range(order):
        if all(table[e][x] == x and table[x][e] == x for x in range(order)):
            identity = e
            break
    if identity is None:
        raise InvalidGroupTable("no identity element")
    for x in range(order):
        if not any(
            table[x][y] == identity and table[y][x] == identity for y in range(order)
        ):
            raise InvalidGroupTable(f"element {x} has no inverse")
    for x in range(order):
        for y in range(order):
            for z in range(order):
                if table[table[x][y]][z] != table[x][table[y][z]]:
                    raise InvalidGroupTable("multiplication is not associative")
    gens = tuple(gen_images)
    for g in gens:
        if not 0 <= g < order:
            raise InvalidGroupTable(f"generator image {g} out of range")
    reached = {identity}
    frontier = [identity]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = table[x][g]
            if y not in reached:
                reached.add(y)
                frontier.append(y)
    if len(reached) != order:
        raise NotGenerating(
            f"marked generators reach only {len(reached)} of {order} elements"
        )
    return MarkedGroup(order, table, identity, gens)


def cyclic_group(n: int, images: Sequence[int]) -> MarkedGroup:
    """Z/n with marked generators given as residues."""
    if n < 1:
        raise InvalidGroupTable(f"cyclic group order must be >= 1, got {n}")
    mul = [[(i + j) % n for j in range(n)] for i in range(n)]
    return validate_marked_group(mul, [i % n for i in images])


def permutation_marked_group(
    perms: Sequence[Sequence[int]],
) -> tuple[MarkedGroup, tuple[Perm, ...]]:
    """The permutation group generated by the given permutations.

    Elements are enumerated breadth-first from the identity, multiplying on
    the right by the generators in order; the element list is returned
    alongside the abstract marked group, and indices follow discovery order
    with the identity first."""
    if not perms:
        raise InvalidGroupTable("need at least one generator permutation")
    degree = len(perms[0])
    gens: list[Perm] = []
    for p in perms:
        q = tuple(p)
        if len(q) != degree or sorted(q) != list(range(degree)):
            raise NotBijective("generator is not a permutation")
        gens.append(q)
    identity = perm_identity(degree)
    elements: list[Perm] = [identity]
    index: dict[Perm, int] = {identity: 0}
    queue = [identity]
    while queue:
        current = queue.pop(0)
        for g in gens:
            nxt = perm_compose(current, g)
            if nxt not in index:
                index[nxt] = len(elements)
                elements.append(nxt)
                queue.append(nxt)
    order = len(elements)
    mul = [
        [index[perm_compose(elements[i], elements[j])] for j in range(order)]
        for i in range(order)
    ]
    group = validate_marked_group(mul, [index[g] for g in gens])
    return group, tuple(elements)


def marked_group_isomorphism(g: MarkedGroup, h: MarkedGroup) -> Optional[tuple[int, ...]]:
    """A generator-respecting isomorphism g -> h as an index map, or None.

    Since the marked generators generate, the map is forced: the image of a
    product of generators is the corresponding product of images.  The forced
    map is built breadth-first and checked for bijectivity and for preserving
    the whole multiplication table."""
    if g.k != h.k:
        return None
    if g.order != h.order:
        return None
    phi: dict[int, int] = {g.identity: h.identity}
    queue = [g.identity]
    while queue:
        x = queue.pop(0)
        for gi in range(g.k):
            y = g.mul[x][g.gen_images[gi]]
            image = h.mul[phi[x]][h.gen_images[gi]]
            if y in phi:
                if phi[y] != image:
                    return None
            else:
                phi[y] = image
                queue.append(y)
    if len(phi) != g.order or len(set(phi.values())) != g.order:
        return None
    for x in range(g.order):
        for y in range(g.order):
            if phi[g.mul[x][y]] != h.mul[phi[x]][phi[y]]:
                return None
    return tuple(phi[x] for x in range(g.order))


# ---------------------------------------------------------------------------
# quotient actions


def quotient_action(group: MarkedGroup) -> FkAction:
    """The action on the group's uniform measure by left multiplication.

    Atom x is group element x with mass 1/order; generator i sends x to
    gen_images[i] * x.  The action is transitive because the marked
    generators generate."""
    alg = validate_algebra([Fraction(1, group.order)] * group.order)
    gens = [
        tuple(group.mul[g][x] for x in range(group.order)) for g in group.gen_images
    ]
    return validate_action(alg, gens)


@dataclass(frozen=True)
class JointQuotient:
    """The subgroup of a direct product generated by paired generators,
    with the coordinate projections recorded per element."""

    group: MarkedGroup
    proj1: tuple[int, ...]
    proj2: tuple[int, ...]


def joint_quotient(g1: MarkedGroup, g2: MarkedGroup) -> JointQuotient:
    """Subgroup of g1 x g2 generated by (gen_i, gen_i) pairs.

    Elements are discovered breadth-first from the identity pair; the
    resulting quotient action factors onto both quotient actions through
    the recorded projections."""
    if g1.k != g2.k:
        raise ArityMismatch(f"groups mark {g1.k} and {g2.k} generators")
    start = (g1.identity, g2.identity)
    elements: list[tuple[int, int]] = [start]
    index: dict[tuple[int, int], int] = {start: 0}
    queue = [start]
    pair_gens = list(zip(g1.gen_images, g2.gen_images))
    while queue:
        x1, x2 = queue.pop(0)
        for a1, a2 in pair_gens:
            nxt = (g1.mul[x1][a1], g2.mul[x2][a2])
            if nxt not in index:
                index[nxt] = len(elements)
                elements.append(nxt)
                queue.append(nxt)
    order = len(elements)
    mul = [[0] * order for _ in range(order)]
    for i, (x1, x2) in enumerate(elements):
        for j, (y1, y2) in enumerate(elements):
            prod = (g1.mul[x1][y1], g2.mul[x2][y2])
            if prod not in index:
                raise InvalidGroupTable("generated pair set is not closed")
            mul[i][j] = index[prod]
    group = validate_marked_group(
        mul, [index[(a1, a2)] for a1, a2 in pair_gens]
    )
    return JointQuotient(
        group,
        tuple(e[0] for e in elements),
        tuple(e[1] for e in elements),
    )


# ---------------------------------------------------------------------------
# extension of partial automorphisms to an equal-atom overalgebra


@dataclass(frozen=True)
class EppaExtension:
    """An equal-atom algebra, an action extending the partial automorphisms,
    and the blockwise embedding of the original algebra."""

    algebra: MeasuredAlgebra
    action: FkAction
    embedding: PartialIsomorphism


def eppa_extend(
    alg: MeasuredAlgebra, partials: Sequence[PartialIsomorphism]
) -> EppaExtension:
    """Extend partial automorphisms of alg to automorphisms of an equal-atom
    algebra.

    The overalgebra has N = lcm of the mass denominators atoms of mass 1/N;
    atom i embeds as a run of consecutive unit atoms.  Each partial becomes a
    partial injection on units by refining paired blocks lexicographically,
    and is completed by matching the leftover units in increasing order, one
    generator per partial."""
    for p in partials:
        if p.source.id != alg.id or p.target.id != alg.id:
            raise AlgebraMismatch("partials must map the given algebra to itself")
    n_units = alg.denominator_lcm()
    big = validate_algebra([Fraction(1, n_units)] * n_units)
    starts: list[int] = []
    pos = 0
    for mass in alg.atoms:
        starts.append(pos)
        pos += int(mass * n_units)
    counts = [int(mass * n_units) for mass in alg.atoms]

    def block_units(block: frozenset[int]) -> list[int]:
        return [
            starts[atom] + j for atom in sorted(block) for j in range(counts[atom])
        ]

    gens: list[Perm] = []
    for p in partials:
        assignment: dict[int, int] = {}
        used_targets: set[int] = set()
        for src, tgt in p.pairs:
            src_units = block_units(src)
            tgt_units = block_units(tgt)
            for u, v in zip(src_units, tgt_units):
                assignment[u] = v
                used_targets.add(v)
        free_sources = [u for u in range(n_units) if u not in assignment]
        free_targets = [v for v in range(n_units) if v not in used_targets]
        for u, v in zip(free_sources, free_targets):
            assignment[u] = v
        gens.append(tuple(assignment[u] for u in range(n_units)))

    action = validate_action(big, gens)
    embedding = PartialIsomorphism.of(
        alg, big, [((i,), tuple(block_units(frozenset([i])))) for i in range(alg.size)]
    )
    return EppaExtension(big, action, embedding)


# ---------------------------------------------------------------------------
# ergodization


@dataclass(frozen=True)
class Ergodization:
    """A transitive action obtained by composing generators with atom swaps,
    together with the number of swaps applied."""

    action: FkAction
    modifications: int


def ergodize(act: FkAction, fixed: AtomPartition) -> Ergodization:
    """Make an equal-atom action transitive without disturbing a subalgebra.

    fixed is a partition whose blocks every generator must map onto blocks,
    with no nontrivial union of blocks invariant under all generators.  While
    the action has several orbit components, the first component is merged
    into another by one involution: scan generators and component atoms in
    increasing order for an image block that leaves the component, and swap
    the image atom with the lowest-index atom outside.  Each swap happens
    inside one image block, so the induced maps on the blocks never change;
    at most (number of components - 1) swaps are applied."""
    alg = act.algebra
    if fixed.algebra.id != alg.id:
        raise AlgebraMismatch("fixed partition does not live on the action's algebra")
    if len(set(alg.atoms)) != 1:
        raise UnequalAtoms("ergodization requires all atoms of equal mass")
    block_index = fixed.block_index()
    block_perms: list[list[int]] = []
    for p in act.gens:
        bp = [-1] * len(fixed.blocks)
        for bi, block in enumerate(fixed.blocks):
            image = frozenset(p[x] for x in block)
            if image not in fixed.blocks:
                raise PartitionNotPreserved(
                    f"generator image of block {sorted(block)} is not a block"
                )
            bp[bi] = fixed.blocks.index(image)
        block_perms.append(bp)

    seen = [False] * len(fixed.blocks)
    stack = [0]
    seen[0] = True
    while stack:
        b = stack.pop()
        for bp in block_perms:
            for nb in (bp[b], bp.index(b)):
                if not seen[nb]:
                    seen[nb] = True
                    stack.append(nb)
    if not all(seen):
        element = tuple(
            sorted(x for bi, block in enumerate(fixed.blocks) if seen[bi] for x in block)
        )
        raise PreconditionInvariantElement(
            "a nontrivial union of fixed blocks is invariant under all generators",
            element,
        )

    gens = [list(p) for p in act.gens]
    modifications = 0
    while True:
        current = validate_action(alg, [tuple(p) for p in gens])
        comps = invariant_components(current).components
        if len(comps) == 1:
            return Ergodization(current, modifications)
        first = comps[0]
        swap = _find_merge_swap(gens, fixed, block_index, first)
        if swap is None:
            raise LPInternal("no merging swap found despite precondition")
        gi, u, v = swap
        p = gens[gi]
        pu = [x for x in range(alg.size) if p[x] == u][0]
        pv = [x for x in range(alg.size) if p[x] == v][0]
        p[pu], p[pv] = v, u
        modifications += 1


def _find_merge_swap(
    gens: list[list[int]],
    fixed: AtomPartition,
    block_index: dict[int, int],
    first: frozenset[int],
) -> Optional[tuple[int, int, int]]:
    """Find (generator, image atom, outside atom) merging the first component.

    The image atom is where the generator sends the scanned component atom;
    the outside atom is the lowest atom of the same image block not in the
    component.  Swapping the two inside the generator keeps the induced block
    maps intact."""
    for gi, p in enumerate(gens):
        for x in sorted(first):
            block = fixed.blocks[block_index[x]]
            image_block = frozenset(p[y] for y in block)
            outside = sorted(y for y in image_block if y not in first)
            if outside:
                return gi, p[x], outside[0]
    return None


# ---------------------------------------------------------------------------
# embeddings into quotient systems


@dataclass(frozen=True)
class QuotientEmbedding:
    """An exact embedding of an action into a quotient (or quotient tensor
    trivial) action, with the generated permutation group and its elements."""

    group: MarkedGroup
    elements: tuple[Perm, ...]
    target: FkAction
    sigma: PartialIsomorphism
    base_factor: Optional[MeasuredAlgebra] = None


def embed_transitive_into_quotient(act: FkAction) -> QuotientEmbedding:
    """Embed a transitive equal-atom action into the quotient action of the
    permutation group its generators generate.

    With base atom o the lowest atom, atom c maps to the set of group
    elements sending o to c; left multiplication by a generator permutes
    these sets exactly as the generator permutes atoms."""
    alg = act.algebra
    if len(set(alg.atoms)) != 1:
        raise UnequalAtoms("embedding requires all atoms of equal mass")
    if not invariant_components(act).ergodic:
        raise NotTransitive("action is not transitive on atoms")
    group, elements = permutation_marked_group(act.gens)
    target = quotient_action(group)
    pairs = []
    for c in range(alg.size):
        stab = tuple(i for i, e in enumerate(elements) if e[0] == c)
        pairs.append(((c,), stab))
    sigma = PartialIsomorphism.of(alg, target.algebra, pairs)
    return QuotientEmbedding(group, elements, target, sigma)


def embed_into_profinite_tensor(act: FkAction) -> QuotientEmbedding:
    """Embed an equal-atom action into quotient action tensor trivial action.

    One trivial-factor atom per orbit component, weighted by the component
    mass.  An atom c in component o maps to the set of pairs (gamma, o) over
    group elements gamma sending the component's lowest atom to c; the mass
    of that set is exactly the atom mass, and left multiplication on the
    first coordinate intertwines the actions."""
    alg = act.algebra
    if len(set(alg.atoms)) != 1:
        raise UnequalAtoms("embedding requires all atoms of equal mass")
    comps = invariant_components(act).components
    base_factor = validate_algebra([alg.mass_of(c) for c in comps])
    group, elements = permutation_marked_group(act.gens)
    target = tensor_trivial(quotient_action(group), base_factor)
    width = len(comps)
    pairs = []
    for oi, comp in enumerate(comps):
        base_atom = min(comp)
        for c in sorted(comp):
            gammas = [i for i, e in enumerate(elements) if e[base_atom] == c]
            pairs.append(((c,), tuple(g * width + oi for g in gammas)))
    pairs.sort(key=lambda pr: pr[0])
    sigma = PartialIsomorphism.of(alg, target.algebra, pairs)
    return QuotientEmbedding(group, elements, target, sigma, base_factor)


# ---------------------------------------------------------------------------
# approximate conjugacy search


@dataclass(frozen=True)
class ConjugacyCertificate:
    """An explicit isomorphism between uniform refinements of two actions and
    its exact defect.

    eps equals max over generators of the uniform distance between the
    conjugated generator and its counterpart, recomputed from the mapping;
    exhausted marks results where the search budget ended above zero."""

    iso: Isomorphism
    eps: Fraction
    act1_refined: FkAction
    act2_refined: FkAction
    projection1: tuple[int, ...]
    projection2: tuple[int, ...]
    exhausted: bool


def verify_conjugacy(cert: ConjugacyCertificate) -> Fraction:
    """Recompute the certificate defect from scratch."""
    h = cert.iso.mapping
    hinv = perm_inverse(h)
    worst = ZERO
    for g1, g2 in zip(cert.act1_refined.gens, cert.act2_refined.gens):
        conj = perm_compose(h, perm_compose(g1, hinv))
        d = uniform_distance(cert.act2_refined.algebra, conj, g2)
        if d > worst:
            worst = d
    return worst


def approx_conjugacy_search(
    act1: FkAction, act2: FkAction, max_refine: int = 1, beam_width: int = 16
) -> ConjugacyCertificate:
    """Search for a near-conjugacy between two actions.

    Both actions are refined to a common uniform atom count (growing with
    the refinement depth).  A budgeted backtracking search first looks for
    an exact conjugacy (zero broken generator edges); when none is found
    within the budget, a beam search builds the atom bijection greedily:
    source atoms in increasing order, candidate targets scored by the
    number of generator edges they break among decided atoms, ties to the
    lexicographically smallest mapping.  Over uniform atoms this is the
    one-block extension step with mass bookkeeping trivial.  The reported
    eps is recomputed exactly from the returned mapping, and the search
    stops early when it reaches zero; optimality is never claimed."""
    if act1.k != act2.k:
        raise ArityMismatch(f"actions have {act1.k} and {act2.k} generators")
    if max_refine < 1 or beam_width < 1:
        raise ValueError("max_refine and beam_width must be >= 1")
    base_units = lcm(
        act1.algebra.denominator_lcm(), act2.algebra.denominator_lcm()
    )
    best: Optional[ConjugacyCertificate] = None
    for depth in range(1, max_refine + 1):
        n = base_units * depth
        unit = Fraction(1, n)
        r1, proj1 = refine_action_to_unit(act1, unit)
        r2, proj2 = refine_action_to_unit(act2, unit)
        mapping = _exact_assign(r1, r2)
        if mapping is None:
            mapping = _beam_assign(r1, r2, beam_width)
        iso = Isomorphism.of(r1.algebra, r2.algebra, mapping)
        cert = ConjugacyCertificate(
            iso, ZERO, r1, r2, proj1, proj2, exhausted=False
        )
        eps = verify_conjugacy(cert)
        cert = ConjugacyCertificate(iso, eps, r1, r2, proj1, proj2, exhausted=eps != 0)
        if best is None or cert.eps < best.eps:
            best = cert
        if best.eps == 0:
            return best
    return best


EXACT_SEARCH_BUDGET = 200_000


def _exact_assign(r1: FkAction, r2: FkAction) -> Optional[tuple[int, ...]]:
    """Backtracking search for a bijection conjugating r1 exactly onto r2.

    Atoms are visited breadth-first along generator edges, so all but the
    component roots have a decided neighbor when placed; candidate targets
    must respect every generator edge into decided atoms.  Both the atom
    order and the target order are fixed, so the result is deterministic.
    Returns None when no exact conjugacy is found within the node budget.
    """
    n = r1.algebra.size
    order: list[int] = []
    seen = [False] * n
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            x = queue.popleft()
            order.append(x)
            for p in r1.gens + r1.inv_gens:
                y = p[x]
                if not seen[y]:
                    seen[y] = True
                    queue.append(y)
    mapping = [-1] * n
    used = [False] * n
    edges = list(zip(r1.gens, r1.inv_gens, r2.gens, r2.inv_gens))
    budget = EXACT_SEARCH_BUDGET

    def fits(x: int, t: int) -> bool:
        for g1, ig1, g2, ig2 in edges:
            y = mapping[g1[x]]
            if y >= 0 and y != g2[t]:
                return False
            z = mapping[ig1[x]]
            if z >= 0 and z != ig2[t]:
                return False
        return True

    def descend(idx: int) -> bool:
        nonlocal budget
        if idx == n:
            return True
        x = order[idx]
        for t in range(n):
            if used[t] or not fits(x, t):
                continue
            budget -= 1
            if budget < 0:
                return False
            mapping[x] = t
            used[t] = True
            if descend(idx + 1):
                return True
            mapping[x] = -1
            used[t] = False
        return False

    if descend(0):
        return tuple(mapping)
    return None


def _beam_assign(r1: FkAction, r2: FkAction, beam_width: int) -> tuple[int, ...]:
    """Greedy beam assignment of source atoms to target atoms."""
    n = r1.algebra.size
    gens1 = r1.gens
    inv1 = r1.inv_gens
    gens2 = r2.gens
    states: list[tuple[int, tuple[int, ...]]] = [(0, ())]
    for x in range(n):
        grown: list[tuple[int, tuple[int, ...]]] = []
        for score, mapping in states:
            used = set(mapping)
            for t in range(n):
                if t in used:
                    continue
                penalty = 0
                for g1, ig1, g2 in zip(gens1, inv1, gens2):
                    y = g1[x]
                    if y < x and mapping[y] != g2[t]:
                        penalty += 1
                    z = ig1[x]
                    if z < x and g2[mapping[z]] != t:
                        penalty += 1
                grown.append((score + penalty, mapping + (t,)))
        grown.sort()
        states = grown[:beam_width]
    return states[0][1]
