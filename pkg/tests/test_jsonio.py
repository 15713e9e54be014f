"""JSON interchange: exact rationals, algebras, actions, groups,
partials, and the rendered document format."""
from __future__ import annotations

import json
from fractions import Fraction

import pytest

from pmplab.algebra import AtomPartition, Event, EventTuple, validate_algebra
from pmplab.action import validate_action
from pmplab.constructions import PartialIsomorphism, cyclic_group
from pmplab.errors import ValidationError
from pmplab.jsonio import (
    action_from_json,
    action_to_json,
    algebra_from_json,
    algebra_to_json,
    decimal_rendering,
    event_from_json,
    event_to_json,
    format_rational,
    group_from_json,
    group_to_json,
    parse_rational,
    partial_from_json,
    partial_to_json,
    partition_from_json,
    partition_to_json,
    render_document,
    tuple_from_json,
    tuple_to_json,
    word_from_json,
)

F = Fraction


def test_rational_round_trip():
    for v in [F(0), F(1), F(1, 3), F(-5, 7), F(22, 4)]:
        assert parse_rational(format_rational(v)) == v
    assert format_rational(F(0)) == "0/1"
    assert parse_rational("3") == 3
    assert parse_rational("6/4") == F(3, 2)
    with pytest.raises(ValidationError):
        parse_rational("1/0")
    with pytest.raises(ValidationError):
        parse_rational("a/b")


def test_decimal_rendering_is_advisory():
    assert decimal_rendering(F(1, 2)) == "0.5"
    third = decimal_rendering(F(1, 3))
    assert third.startswith("0.3333333333")
    assert len(third.replace("0.", "")) <= 21


def test_algebra_round_trip():
    alg = validate_algebra([F(1, 2), F(1, 3), F(1, 6)])
    doc = algebra_to_json(alg)
    assert doc == {"atoms": ["1/2", "1/3", "1/6"]}
    back = algebra_from_json(doc)
    assert back.atoms == alg.atoms
    with pytest.raises(ValidationError):
        algebra_from_json({"atoms": ["1/2", "1/3"]})


def test_event_and_tuple_forms():
    alg = validate_algebra([F(1, 2), F(1, 2)])
    e = Event.of(alg, [1])
    assert event_to_json(e) == {"members": [1]}
    assert event_from_json(alg, {"members": [1]}) == e
    assert event_from_json(alg, [1]) == e
    t = EventTuple.of_members(alg, [[0], [0, 1]])
    doc = tuple_to_json(t)
    assert doc == {"events": [{"members": [0]}, {"members": [0, 1]}]}
    assert tuple_from_json(alg, doc) == t
    assert tuple_from_json(alg, [[0], [0, 1]]) == t
    with pytest.raises(ValidationError):
        event_from_json(alg, [5])


def test_partition_round_trip():
    alg = validate_algebra([F(1, 4)] * 4)
    part = AtomPartition.of(alg, [[0, 2], [1, 3]])
    doc = partition_to_json(part)
    assert partition_from_json(alg, doc).blocks == part.blocks
    assert partition_from_json(alg, [[0, 2], [1, 3]]).blocks == part.blocks
    with pytest.raises(ValidationError):
        partition_from_json(alg, [[0], [1]])


def test_action_round_trip_and_declared_k():
    alg = validate_algebra([F(1, 2), F(1, 2)])
    act = validate_action(alg, [(1, 0), (0, 1)])
    doc = action_to_json(act)
    assert doc["k"] == 2
    back = action_from_json(doc)
    assert back.gens == act.gens
    assert back.algebra.atoms == act.algebra.atoms
    no_k = {"algebra": doc["algebra"], "gens": doc["gens"]}
    assert action_from_json(no_k).gens == act.gens
    with pytest.raises(ValidationError):
        action_from_json({"algebra": doc["algebra"], "k": 1, "gens": doc["gens"]})


def test_group_round_trip_and_builtins():
    g = cyclic_group(6, [1, 5])
    doc = group_to_json(g)
    back = group_from_json(doc)
    assert back.mul == g.mul
    assert back.gen_images == g.gen_images

    z3 = group_from_json("cyclic:3:1,2")
    assert z3.order == 3
    assert z3.gen_images == (1, 2)

    s3 = group_from_json("sym:3:1,0,2;0,2,1")
    assert s3.order == 6
    assert s3.k == 2

    assert group_from_json("cyclic:3:7").gen_images == (1,)
    with pytest.raises(ValidationError):
        group_from_json("cyclic:3:x")
    with pytest.raises(ValidationError):
        group_from_json("sym:3:1,0")
    with pytest.raises(ValidationError):
        group_from_json("spin:3:1")
    bad_order = dict(doc)
    bad_order["order"] = 7
    with pytest.raises(ValidationError):
        group_from_json(bad_order)


def test_word_forms():
    w = word_from_json([1, -2, 1])
    assert w.letters == (1, -2, 1)
    with pytest.raises(ValidationError):
        word_from_json(["x"])


def test_partial_round_trip():
    alg = validate_algebra([F(1, 4)] * 4)
    p = PartialIsomorphism.of(alg, alg, [([0], [1]), ([2, 3], [0, 2])])
    doc = partial_to_json(p)
    back = partial_from_json(alg, alg, doc)
    assert back.pairs == p.pairs
    listform = partial_from_json(alg, alg, {"pairs": [[[0], [1]]]})
    assert listform.pairs == ((frozenset({0}), frozenset({1})),)


def test_render_document_is_stable():
    doc = {"b": F(1, 2), "a": [1, 2]}
    text = render_document({"b": "1/2", "a": [1, 2]})
    assert text.endswith("\n")
    assert json.loads(text) == {"b": "1/2", "a": [1, 2]}
    assert text.index('"a"') < text.index('"b"')
