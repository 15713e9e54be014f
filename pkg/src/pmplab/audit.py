"""Closure-condition audits for finite actions.

The first condition compares each pushed parameter against its stated image
and measures conditional independence defects; the second searches for a
realizing tuple whose orbit under the generators reproduces a target family
within twice a tolerance.  The residual combines both into a certified upper
bound that is zero exactly when the search exhibits a witness good enough
for the implication between them.  A separate check measures, inside an
extension, how well tuples from the small system can imitate the triple
intersection pattern of tuples from the large one.

All searches are deterministic: exhaustive in lexicographic order when the
candidate space is small, otherwise steepest-descent toggling from fixed
seeds.  Negative outcomes are reported as best-seen upper bounds, never as
refutations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import (
    ZERO,
    Event,
    EventTuple,
    MeasuredAlgebra,
    joint_distribution,
    lift_tuple,
)
from .action import (
    FkAction,
    Word,
    apply_gen_tuple,
    apply_word,
    equal_refine_action,
)
from .constructions import PartialIsomorphism
from .errors import (
    AlgebraMismatch,
    ArityMismatch,
    EmbeddingNotEquivariant,
    NonpositiveEps,
    WrongTupleCount,
)
from .modeltheory import (
    independence_deficiency,
    joint_tv_distance,
    type_distance_max,
    type_distance_tv,
)

EXHAUSTIVE_TUPLE_CAP = 4096
GREEDY_ROUNDS = 64


# ---------------------------------------------------------------------------
# first closure condition


@dataclass(frozen=True)
class C1Report:
    """Pushforward distances and independence defects for one instance.

    xi[i-1] measures how far the i-th parameter is from the pushed base
    parameter; psi[0] measures dependence of the base parameter on the full
    generator orbit of the anchor; psi[i] the analogous defect for the i-th
    parameter.  satisfied holds when every quantity is strictly below eps."""

    xi: tuple[Fraction, ...]
    psi: tuple[Fraction, ...]
    eps: Fraction
    satisfied: bool


def _check_depth(max_refine: int) -> None:
    if max_refine < 1:
        raise ValueError(f"max_refine must be >= 1, got {max_refine}")


def _check_instance(
    act: FkAction, a: EventTuple, bs: Sequence[EventTuple], eps: Fraction
) -> tuple[EventTuple, ...]:
    if eps <= 0:
        raise NonpositiveEps(f"tolerance must be positive, got {eps}")
    if len(bs) != act.k + 1:
        raise WrongTupleCount(
            f"need {act.k + 1} parameter tuples for {act.k} generators, got {len(bs)}"
        )
    if a.algebra.id != act.algebra.id:
        raise AlgebraMismatch("anchor tuple does not live on the action's algebra")
    tuples = tuple(bs)
    arity = tuples[0].arity
    for b in tuples:
        if b.algebra.id != act.algebra.id:
            raise AlgebraMismatch("parameter tuple does not live on the action's algebra")
        if b.arity != arity:
            raise ArityMismatch(
                f"parameter tuples have arities {arity} and {b.arity}"
            )
    return tuples


def check_C1(
    act: FkAction,
    a: EventTuple,
    bs: Sequence[EventTuple],
    eps: Fraction,
    metric: str = "tv",
) -> C1Report:
    """Evaluate the first closure condition.

    For each generator i, xi_i is the type distance, over the pushed anchor,
    between the i-th parameter and the pushed base parameter.  psi_0 is the
    independence defect of the base parameter from the tuple of all pushed
    anchors over the anchor itself; psi_i the defect of the i-th parameter
    from the anchor joined with the other pushes, over the i-th push.

    metric selects the type distance for the xi values: "tv" (closed form,
    the default) or "max" (linear-program cross-check).  The psi defects are
    total-variation quantities in both modes."""
    if metric not in ("tv", "max"):
        raise ValueError(f'metric must be "tv" or "max", got {metric!r}')
    distance = type_distance_tv if metric == "tv" else type_distance_max
    tuples = _check_instance(act, a, bs, eps)
    b0 = tuples[0]
    k = act.k
    pushed = [apply_gen_tuple(act, i, a) for i in range(1, k + 1)]
    xi = tuple(
        distance(pushed[i - 1], tuples[i], apply_gen_tuple(act, i, b0))
        for i in range(1, k + 1)
    )
    orbit = a
    if pushed:
        orbit = pushed[0]
        for extra in pushed[1:]:
            orbit = orbit.concat(extra)
    psi = [independence_deficiency(a, b0, orbit)]
    for i in range(1, k + 1):
        others = a
        for j in range(1, k + 1):
            if j != i:
                others = others.concat(pushed[j - 1])
        psi.append(independence_deficiency(pushed[i - 1], tuples[i], others))
    quantities = list(xi) + psi
    worst = max(quantities) if quantities else ZERO
    return C1Report(xi, tuple(psi), eps, worst < eps)


# ---------------------------------------------------------------------------
# second closure condition: witness search


@dataclass(frozen=True)
class C2Witness:
    """A candidate tuple on a refined action and its exact distance.

    distance is the total-variation gap between the joint law of the anchor
    with the parameters and the joint law of the lifted anchor with the
    candidate and its pushes, recomputed exactly from c."""

    c: EventTuple
    distance: Fraction
    refinement_depth: int


@dataclass(frozen=True)
class C2SearchResult:
    """Search outcome: found marks distance < 2*eps; the best witness seen is
    always reported, making a negative answer a certified upper bound only."""

    found: bool
    witness: C2Witness


def _orbit_tuple(act: FkAction, c: EventTuple) -> EventTuple:
    out = c
    for i in range(1, act.k + 1):
        out = out.concat(apply_gen_tuple(act, i, c))
    return out


def c2_distance(
    act_refined: FkAction,
    a_lifted: EventTuple,
    target_joint,
    c: EventTuple,
) -> Fraction:
    """Distance of one candidate: joint law of (lifted anchor, c and pushes)
    against the target joint law of (anchor, parameters)."""
    jc = joint_distribution(a_lifted, _orbit_tuple(act_refined, c))
    return joint_tv_distance(target_joint, jc)


def _tuple_candidates(size: int, arity: int):
    """All event tuples over `size` atoms in lexicographic bitmask order."""
    def events():
        for mask in range(1 << size):
            yield tuple(j for j in range(size) if mask >> j & 1)

    if arity == 0:
        yield ()
        return
    for head in events():
        if arity == 1:
            yield (head,)
        else:
            for rest in _tuple_candidates(size, arity - 1):
                yield (head,) + rest


def _greedy_descent(size, arity, seeds, evaluate):
    """Steepest-descent search toggling one atom of one coordinate at a time.

    Deterministic: seeds in order, toggles scanned lexicographically, strict
    improvement required, fixed round budget."""
    best_val: Optional[Fraction] = None
    best_members: Optional[tuple[tuple[int, ...], ...]] = None
    for seed in seeds:
        current = tuple(tuple(sorted(e)) for e in seed)
        value = evaluate(current)
        for _ in range(GREEDY_ROUNDS):
            improved = None
            for coord in range(arity):
                members = set(current[coord])
                for atom in range(size):
                    flipped = sorted(
                        members ^ {atom}
                    )
                    candidate = (
                        current[:coord] + (tuple(flipped),) + current[coord + 1 :]
                    )
                    v = evaluate(candidate)
                    if v < value and (improved is None or v < improved[0]):
                        improved = (v, candidate)
            if improved is None:
                break
            value, current = improved
        if best_val is None or value < best_val or (
            value == best_val and current < best_members
        ):
            best_val, best_members = value, current
    return best_val, best_members


def _search_best(
    size: int,
    arity: int,
    seeds,
    evaluate,
    stop_below: Fraction,
):
    """Best candidate tuple by exhaustion or greedy descent.

    Exhaustion applies when the total number of candidate tuples is at most
    EXHAUSTIVE_TUPLE_CAP; enumeration order is lexicographic in bitmasks and
    the scan stops at the first candidate strictly below stop_below (or at
    zero, which cannot be improved)."""
    total = (1 << size) ** arity if arity else 1
    if total <= EXHAUSTIVE_TUPLE_CAP:
        best_val: Optional[Fraction] = None
        best_members = None
        for members in _tuple_candidates(size, arity):
            v = evaluate(members)
            if best_val is None or v < best_val:
                best_val, best_members = v, members
                if v < stop_below or v == 0:
                    break
        return best_val, best_members
    return _greedy_descent(size, arity, seeds, evaluate)


def search_C2_witness(
    act: FkAction,
    a: EventTuple,
    bs: Sequence[EventTuple],
    eps: Fraction,
    max_refine: int = 1,
) -> C2SearchResult:
    """Search refinements for a tuple realizing the parameters jointly.

    For each refinement depth m = 1..max_refine every atom is split into m
    equal parts, the anchor is lifted, and candidate tuples c are scored by
    the total-variation gap between the law of (anchor, parameters) and the
    law of (lifted anchor, c with all its generator pushes).  A witness is
    any candidate with distance strictly below 2*eps; the best candidate is
    reported either way."""
    _check_depth(max_refine)
    tuples = _check_instance(act, a, bs, eps)
    bcat = tuples[0]
    for b in tuples[1:]:
        bcat = bcat.concat(b)
    target = joint_distribution(a, bcat)
    arity = tuples[0].arity
    threshold = 2 * eps
    best: Optional[C2Witness] = None
    for depth in range(1, max_refine + 1):
        refined, projection = equal_refine_action(act, depth)
        a_lift = lift_tuple(a, refined.algebra, projection)
        b0_lift = lift_tuple(tuples[0], refined.algebra, projection)

        def evaluate(members: tuple[tuple[int, ...], ...]) -> Fraction:
            c = EventTuple.of_members(refined.algebra, members)
            return c2_distance(refined, a_lift, target, c)

        seeds = [tuple(e.members for e in b0_lift.events)]
        val, members = _search_best(
            refined.algebra.size, arity, seeds, evaluate, threshold
        )
        witness = C2Witness(
            EventTuple.of_members(refined.algebra, members), val, depth
        )
        if best is None or witness.distance < best.distance:
            best = witness
        if best.distance < threshold:
            return C2SearchResult(True, best)
    return C2SearchResult(False, best)


def axiom_residual(
    act: FkAction, a: EventTuple, bs: Sequence[EventTuple], max_refine: int = 1
) -> Fraction:
    """Certified upper bound for one instance of the closure axiom.

    Computes the first-condition quantities, searches for a second-condition
    witness, and returns max(0, best distance - 2 * worst quantity).  The
    search distance upper-bounds the true infimum over all extensions, so a
    zero return certifies the axiom instance; a positive return is only a
    bound."""
    _check_depth(max_refine)
    report = check_C1(act, a, bs, Fraction(1))
    quantities = list(report.xi) + list(report.psi)
    worst = max(quantities) if quantities else ZERO
    tuples = _check_instance(act, a, bs, Fraction(1))
    bcat = tuples[0]
    for b in tuples[1:]:
        bcat = bcat.concat(b)
    target = joint_distribution(a, bcat)
    arity = tuples[0].arity
    best: Optional[Fraction] = None
    for depth in range(1, max_refine + 1):
        refined, projection = equal_refine_action(act, depth)
        a_lift = lift_tuple(a, refined.algebra, projection)
        b0_lift = lift_tuple(tuples[0], refined.algebra, projection)

        def evaluate(members: tuple[tuple[int, ...], ...]) -> Fraction:
            c = EventTuple.of_members(refined.algebra, members)
            return c2_distance(refined, a_lift, target, c)

        seeds = [tuple(e.members for e in b0_lift.events)]
        val, _members = _search_best(
            refined.algebra.size, arity, seeds, evaluate, 2 * worst
        )
        if best is None or val < best:
            best = val
        if best <= 2 * worst:
            break
    residual = best - 2 * worst
    return residual if residual > 0 else ZERO


# ---------------------------------------------------------------------------
# existential closedness inside an extension


@dataclass(frozen=True)
class EcWitness:
    """A tuple in a refinement of the small system whose triple intersection
    pattern with the anchor imitates the target tuple in the extension."""

    cs: EventTuple
    discrepancy: Fraction
    refinement_depth: int


@dataclass(frozen=True)
class EcSearchResult:
    found: bool
    witness: EcWitness


def _check_embedding(
    small: FkAction, big: FkAction, embed: PartialIsomorphism
) -> dict[int, frozenset[int]]:
    if small.k != big.k:
        raise ArityMismatch(f"actions have {small.k} and {big.k} generators")
    if embed.source.id != small.algebra.id or embed.target.id != big.algebra.id:
        raise AlgebraMismatch("embedding endpoints do not match the two actions")
    blocks = embed.atom_blocks()
    if len(blocks) != small.algebra.size:
        raise AlgebraMismatch("embedding must cover every atom of the small system")
    for gi, (gs, gb) in enumerate(zip(small.gens, big.gens), start=1):
        for x, block in blocks.items():
            image = frozenset(gb[y] for y in block)
            if image != blocks[gs[x]]:
                raise EmbeddingNotEquivariant(
                    f"generator {gi} does not intertwine at atom {x}"
                )
    return blocks


def _triple_pattern(
    alg: MeasuredAlgebra,
    act: FkAction,
    anchors: EventTuple,
    fibers: EventTuple,
    words: Sequence[Word],
) -> dict[tuple[int, int, int, int], Fraction]:
    """All triple intersection masses mu(a_i & c_j & w_l(c_k))."""
    moved = [
        [apply_word(act, w, e) for e in fibers.events] for w in words
    ]
    out: dict[tuple[int, int, int, int], Fraction] = {}
    for i, a_e in enumerate(anchors.events):
        a_set = set(a_e.members)
        for j, c_e in enumerate(fibers.events):
            base = a_set & set(c_e.members)
            for l, row in enumerate(moved):
                for k2, m_e in enumerate(row):
                    out[(i, j, l, k2)] = alg.mass_of(base & set(m_e.members))
    return out


def ec_in_extension_check(
    small: FkAction,
    big: FkAction,
    embed: PartialIsomorphism,
    anchors: EventTuple,
    bs: EventTuple,
    words: Sequence[Word],
    eps: Fraction,
    max_refine: int = 1,
) -> EcSearchResult:
    """Can the small system imitate a tuple living in the extension?

    The target pattern is every mass mu(embed(a_i) & b_j & w_l(b_k)) in the
    big system.  Candidates cs on refinements of the small system are scored
    by the largest absolute deviation of their own pattern from the target;
    a witness needs every deviation strictly below eps.  The embedding must
    send atoms to blocks and intertwine the generators exactly."""
    if eps <= 0:
        raise NonpositiveEps(f"tolerance must be positive, got {eps}")
    _check_depth(max_refine)
    blocks = _check_embedding(small, big, embed)
    if anchors.algebra.id != small.algebra.id:
        raise AlgebraMismatch("anchor tuple must live in the small system")
    if bs.algebra.id != big.algebra.id:
        raise AlgebraMismatch("target tuple must live in the big system")
    ws = list(words)
    pushed_anchors = embed.map_tuple(anchors)
    target = _triple_pattern(big.algebra, big, pushed_anchors, bs, ws)

    best: Optional[EcWitness] = None
    for depth in range(1, max_refine + 1):
        refined, projection = equal_refine_action(small, depth)
        a_lift = lift_tuple(anchors, refined.algebra, projection)

        def evaluate(members: tuple[tuple[int, ...], ...]) -> Fraction:
            cs = EventTuple.of_members(refined.algebra, members)
            pattern = _triple_pattern(refined.algebra, refined, a_lift, cs, ws)
            return max(
                (abs(pattern[key] - target[key]) for key in target),
                default=ZERO,
            )

        seed = _pullback_seed(bs, blocks, projection)
        val, members = _search_best(
            refined.algebra.size, bs.arity, [seed], evaluate, eps
        )
        witness = EcWitness(
            EventTuple.of_members(refined.algebra, members), val, depth
        )
        if best is None or witness.discrepancy < best.discrepancy:
            best = witness
        if best.discrepancy < eps:
            return EcSearchResult(True, best)
    return EcSearchResult(False, best)


def _pullback_seed(
    bs: EventTuple,
    blocks: dict[int, frozenset[int]],
    projection: Sequence[int],
) -> tuple[tuple[int, ...], ...]:
    """Approximate preimage of the target tuple under the embedding: keep the
    refined atoms whose parent's image block lies inside the target event."""
    out = []
    for e in bs.events:
        members = set(e.members)
        inside = {x for x, block in blocks.items() if block <= members}
        out.append(
            tuple(
                u for u, parent in enumerate(projection) if parent in inside
            )
        )
    return tuple(out)
