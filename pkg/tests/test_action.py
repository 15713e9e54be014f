"""Free-group actions on measured algebras: words, orbits, metrics,
refinements, small perturbations."""
from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pmplab.algebra import (
    AtomPartition,
    Event,
    EventTuple,
    validate_algebra,
)
from pmplab.action import (
    FkAction,
    Word,
    apply_perm_event,
    apply_word,
    equal_refine_action,
    generated_subalgebra,
    invariant_components,
    perm_compose,
    perturb_small,
    tensor_trivial,
    uniform_distance,
    uniform_distance_tuples,
    validate_action,
)
from pmplab.errors import (
    AlgebraMismatch,
    LetterOutOfRange,
    NonpositiveDelta,
    NotBijective,
    NotMeasurePreserving,
)

from conftest import (
    random_algebra,
    random_mass_preserving_perm,
    random_permutation,
    uniform_algebra,
)

F = Fraction


def z2_action() -> FkAction:
    alg = validate_algebra([F(1, 2), F(1, 2)])
    return validate_action(alg, [(1, 0)])


def test_validate_action_rejects_bad_generators():
    alg = validate_algebra([F(1, 2), F(1, 2)])
    with pytest.raises(NotBijective):
        validate_action(alg, [(0, 0)])
    alg2 = validate_algebra([F(1, 3), F(2, 3)])
    with pytest.raises(NotMeasurePreserving):
        validate_action(alg2, [(1, 0)])


def test_apply_word_examples():
    act = z2_action()
    e = Event.of(act.algebra, [0])
    assert apply_word(act, Word.of([]), e).members == (0,)
    assert apply_word(act, Word.of([1]), e).members == (1,)
    assert apply_word(act, Word.of([1, -1]), e).members == (0,)
    with pytest.raises(LetterOutOfRange):
        apply_word(act, Word.of([2]), e)
    with pytest.raises(LetterOutOfRange):
        apply_word(act, Word.of([0]), e)


def test_apply_word_is_an_action():
    rng = random.Random(5)
    alg = uniform_algebra(6)
    act = validate_action(
        alg, [random_permutation(rng, 6), random_permutation(rng, 6)]
    )
    for _ in range(40):
        w1 = Word.of([rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 4))])
        w2 = Word.of([rng.choice([1, -1, 2, -2]) for _ in range(rng.randint(0, 4))])
        e = Event.of(alg, [i for i in range(6) if rng.random() < 0.5])
        combined = Word.of(w1.letters + w2.letters)
        assert apply_word(act, combined, e) == apply_word(
            act, w1, apply_word(act, w2, e)
        )
        assert apply_word(act, w1, e).mass == e.mass


def test_invariant_components_examples():
    act = z2_action()
    assert invariant_components(act).components == (frozenset({0, 1}),)
    assert invariant_components(act).ergodic

    triv = validate_action(validate_algebra([F(1, 2), F(1, 2)]), [(0, 1)])
    assert len(invariant_components(triv).components) == 2

    alg4 = uniform_algebra(4)
    act4 = validate_action(alg4, [(1, 0, 3, 2), (0, 1, 2, 3)])
    assert invariant_components(act4).components == (
        frozenset({0, 1}),
        frozenset({2, 3}),
    )


def test_generated_subalgebra_examples():
    act = z2_action()
    part = generated_subalgebra(act, EventTuple.of_members(act.algebra, [[0]]))
    assert part.blocks == (frozenset({0}), frozenset({1}))

    triv = validate_action(
        validate_algebra([F(1, 2), F(1, 4), F(1, 4)]), [(0, 1, 2)]
    )
    part2 = generated_subalgebra(triv, EventTuple.of_members(triv.algebra, [[0]]))
    assert part2.blocks == (frozenset({0}), frozenset({1, 2}))

    # with no seed events the coarsest invariant refinement of {whole} is
    # {whole} itself, whatever the orbit structure
    part3 = generated_subalgebra(triv, EventTuple.of_members(triv.algebra, []))
    assert part3.blocks == (frozenset({0, 1, 2}),)


def _closure_blocks(act: FkAction, seeds: list[frozenset[int]]) -> set[frozenset[int]]:
    """Oracle: boolean/equivariant closure of the seed events, then minimal
    nonempty elements."""
    universe = frozenset(range(act.algebra.size))
    sets: set[frozenset[int]] = {universe}
    for s in seeds:
        sets.add(frozenset(s))
    changed = True
    while changed:
        changed = False
        snapshot = list(sets)
        for s in snapshot:
            for new in [universe - s]:
                if new not in sets:
                    sets.add(new)
                    changed = True
        snapshot = list(sets)
        for s, t in combinations(snapshot, 2):
            new = s & t
            if new not in sets:
                sets.add(new)
                changed = True
        snapshot = list(sets)
        for p in act.gens + act.inv_gens:
            for s in snapshot:
                new = frozenset(p[x] for x in s)
                if new not in sets:
                    sets.add(new)
                    changed = True
    blocks = set()
    for x in range(act.algebra.size):
        block = universe
        for s in sets:
            if x in s:
                block &= s
        blocks.add(block)
    return blocks


def test_generated_subalgebra_matches_boolean_closure_oracle():
    rng = random.Random(21)
    for _ in range(30):
        n = rng.randint(2, 7)
        alg = uniform_algebra(n)
        act = validate_action(
            alg, [random_permutation(rng, n) for _ in range(rng.randint(1, 2))]
        )
        seeds = [
            frozenset(i for i in range(n) if rng.random() < 0.5)
            for _ in range(rng.randint(0, 2))
        ]
        t = EventTuple.of_members(alg, [sorted(s) for s in seeds])
        got = set(generated_subalgebra(act, t).blocks)
        assert got == _closure_blocks(act, seeds)


def test_equal_refine_and_tensor_examples():
    act = z2_action()
    refined, projection = equal_refine_action(act, 2)
    assert refined.algebra.atoms == (F(1, 4),) * 4
    assert refined.gens == ((2, 3, 0, 1),)
    assert projection == (0, 0, 1, 1)

    tens = tensor_trivial(act, validate_algebra([F(1, 2), F(1, 2)]))
    assert tens.algebra.atoms == (F(1, 4),) * 4
    assert tens.gens == ((2, 3, 0, 1),)

    copy = tensor_trivial(act, validate_algebra([F(1)]))
    assert copy.gens == act.gens
    assert copy.algebra.atoms == act.algebra.atoms


def brute_force_uniform_distance(alg, g, h) -> Fraction:
    """Oracle: sup of mu(g e triangle h e) over all events, by integer-mass
    dynamic programming over bitmasks."""
    den = alg.denominator_lcm()
    units = [int(m * den) for m in alg.atoms]
    n = alg.size
    size = 1 << n
    gmask = [0] * size
    hmask = [0] * size
    weight = [0] * size
    for m in range(1, size):
        low = (m & -m).bit_length() - 1
        rest = m & (m - 1)
        gmask[m] = gmask[rest] | (1 << g[low])
        hmask[m] = hmask[rest] | (1 << h[low])
        weight[m] = weight[rest] + units[low]
    best = 0
    for m in range(size):
        d = weight[gmask[m] ^ hmask[m]]
        if d > best:
            best = d
    return Fraction(best, den)


def test_uniform_distance_examples():
    alg = validate_algebra([F(1, 2), F(1, 2)])
    assert uniform_distance(alg, (1, 0), (1, 0)) == 0
    assert uniform_distance(alg, (1, 0), (0, 1)) == 1
    alg3 = uniform_algebra(3)
    assert uniform_distance(alg3, (1, 2, 0), (0, 1, 2)) == F(2, 3)
    assert brute_force_uniform_distance(alg, (1, 0), (0, 1)) == 1
    assert brute_force_uniform_distance(alg3, (1, 2, 0), (0, 1, 2)) == F(2, 3)


def test_uniform_distance_matches_brute_force_on_mixed_masses():
    rng = random.Random(31)
    for _ in range(40):
        alg = random_algebra(rng, max_atoms=7, max_den=24)
        g = random_mass_preserving_perm(rng, alg)
        h = random_mass_preserving_perm(rng, alg)
        assert uniform_distance(alg, g, h) == brute_force_uniform_distance(alg, g, h)


def test_uniform_distance_invariance_under_composition():
    rng = random.Random(47)
    for _ in range(25):
        alg = random_algebra(rng, max_atoms=6, max_den=12)
        g = random_mass_preserving_perm(rng, alg)
        h = random_mass_preserving_perm(rng, alg)
        u = random_mass_preserving_perm(rng, alg)
        d = uniform_distance(alg, g, h)
        assert uniform_distance(alg, perm_compose(g, u), perm_compose(h, u)) == d
        assert uniform_distance(alg, perm_compose(u, g), perm_compose(u, h)) == d


def test_uniform_distance_tuples_takes_the_worst_coordinate():
    alg = uniform_algebra(3)
    gs = [(1, 2, 0), (0, 1, 2)]
    hs = [(0, 1, 2), (0, 1, 2)]
    assert uniform_distance_tuples(alg, gs, hs) == F(2, 3)


def test_perturb_small_whole_space_example():
    act = z2_action()
    fixed = AtomPartition.trivial(act.algebra)
    pert = perturb_small(act, fixed, F(1, 4))
    assert pert.moved == (F(1, 8),)
    atoms = pert.action.algebra.atoms
    assert all(m == F(1, 8) for m in atoms)
    moved_atoms = [x for x in range(len(atoms)) if pert.s[x] != x]
    assert len(moved_atoms) == 2


def test_perturb_small_two_blocks_example():
    alg = validate_algebra([F(1, 4)] * 4)
    act = validate_action(alg, [(1, 0, 3, 2)])
    fixed = AtomPartition.of(alg, [[0, 1], [2, 3]])
    pert = perturb_small(act, fixed, F(1, 10))
    assert pert.moved == (F(1, 16), F(1, 16))


def test_perturb_small_structure():
    rng = random.Random(61)
    for _ in range(20):
        alg = random_algebra(rng, max_atoms=5, max_den=12)
        act = validate_action(alg, [random_mass_preserving_perm(rng, alg)])
        fixed = AtomPartition.trivial(alg)
        delta = F(1, rng.randint(3, 9))
        pert = perturb_small(act, fixed, delta)
        s = pert.s
        n = len(s)
        assert sorted(s) == list(range(n))
        assert tuple(s[s[x]] for x in range(n)) == tuple(range(n))
        assert any(s[x] != x for x in range(n))
        for m in pert.moved:
            assert 0 < m < delta
        refined_alg = pert.action.algebra
        for block_mass, m in zip(
            [alg.mass_of(b) for b in fixed.blocks], pert.moved
        ):
            assert m <= block_mass / 2
        parents = pert.projection
        for x in range(n):
            assert refined_alg.atoms[x] == refined_alg.atoms[s[x]]
        for block in fixed.blocks:
            units = {u for u in range(n) if parents[u] in block}
            assert {s[u] for u in units} == units
    with pytest.raises(NonpositiveDelta):
        perturb_small(act, fixed, F(0))


@st.composite
def _algebra_and_perms(draw):
    n = draw(st.integers(min_value=1, max_value=5))
    alg = uniform_algebra(n)
    perms = [
        tuple(draw(st.permutations(list(range(n))))) for _ in range(3)
    ]
    return alg, perms


@given(_algebra_and_perms())
@settings(max_examples=60, deadline=None)
def test_uniform_distance_is_a_bi_invariant_metric(data):
    alg, (g, h, u) = data
    d = uniform_distance(alg, g, h)
    assert 0 <= d <= 1
    assert (d == 0) == (g == h)
    assert d == uniform_distance(alg, h, g)
    assert uniform_distance(alg, g, u) <= d + uniform_distance(alg, h, u)
    assert uniform_distance(alg, perm_compose(g, u), perm_compose(h, u)) == d
    assert uniform_distance(alg, perm_compose(u, g), perm_compose(u, h)) == d


def test_action_apply_perm_event_respects_algebra():
    act = z2_action()
    other = validate_algebra([F(1, 2), F(1, 2)])
    with pytest.raises(AlgebraMismatch):
        apply_word(act, Word.of([1]), Event.of(other, [0]))
