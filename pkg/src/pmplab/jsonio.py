"""JSON interchange for algebras, events, actions, groups, and reports.

All rational values travel as exact "num/den" strings, zero included
("0/1").  Decimal renderings, where emitted, are advisory 20-significant-
digit strings; the rational strings are normative.  Parsers validate through
the same constructors the library uses, so a parsed object is a checked
object."""
from __future__ import annotations

import decimal
import json
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .algebra import (
    AtomPartition,
    Event,
    EventTuple,
    MeasuredAlgebra,
    validate_algebra,
)
from .action import FkAction, Word, validate_action
from .constructions import (
    MarkedGroup,
    PartialIsomorphism,
    cyclic_group,
    permutation_marked_group,
    validate_marked_group,
)
from .errors import ValidationError

DECIMAL_DIGITS = 20


# ---------------------------------------------------------------------------
# rationals


def format_rational(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def parse_rational(text: str) -> Fraction:
    try:
        if isinstance(text, str) and "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"not a rational: {text!r}") from exc


def decimal_rendering(value: Fraction) -> str:
    """Advisory decimal string with 20 significant digits."""
    ctx = decimal.Context(prec=DECIMAL_DIGITS)
    return str(
        ctx.divide(decimal.Decimal(value.numerator), decimal.Decimal(value.denominator))
    )


# ---------------------------------------------------------------------------
# algebras, events, tuples, partitions


def algebra_to_json(alg: MeasuredAlgebra) -> dict:
    return {"atoms": [format_rational(m) for m in alg.atoms]}


def algebra_from_json(obj: Any) -> MeasuredAlgebra:
    if not isinstance(obj, Mapping) or "atoms" not in obj:
        raise ValidationError('algebra JSON must be {"atoms": [...]}')
    return validate_algebra([parse_rational(m) for m in obj["atoms"]])


def event_to_json(e: Event) -> dict:
    return {"members": list(e.members)}


def event_from_json(alg: MeasuredAlgebra, obj: Any) -> Event:
    if isinstance(obj, Mapping) and "members" in obj:
        members = obj["members"]
    elif isinstance(obj, Sequence) and not isinstance(obj, (str, bytes)):
        members = obj
    else:
        raise ValidationError('event JSON must be {"members": [...]} or a plain list')
    if not all(isinstance(i, int) for i in members):
        raise ValidationError("event members must be integers")
    return Event.of(alg, members)


def tuple_to_json(t: EventTuple) -> dict:
    return {"events": [event_to_json(e) for e in t.events]}


def tuple_from_json(alg: MeasuredAlgebra, obj: Any) -> EventTuple:
    if isinstance(obj, Mapping) and "events" in obj:
        events = obj["events"]
    elif isinstance(obj, Sequence) and not isinstance(obj, (str, bytes)):
        events = obj
    else:
        raise ValidationError('tuple JSON must be {"events": [...]} or a plain list')
    return EventTuple.of(alg, [event_from_json(alg, e) for e in events])


def partition_from_json(alg: MeasuredAlgebra, obj: Any) -> AtomPartition:
    if isinstance(obj, Mapping) and "blocks" in obj:
        blocks = obj["blocks"]
    elif isinstance(obj, Sequence) and not isinstance(obj, (str, bytes)):
        blocks = obj
    else:
        raise ValidationError('partition JSON must be {"blocks": [...]} or a plain list')
    return AtomPartition.of(alg, blocks)


def partition_to_json(part: AtomPartition) -> dict:
    return {"blocks": [sorted(b) for b in part.blocks]}


# ---------------------------------------------------------------------------
# actions and words


def action_to_json(act: FkAction) -> dict:
    return {
        "algebra": algebra_to_json(act.algebra),
        "k": act.k,
        "gens": [list(p) for p in act.gens],
    }


def action_from_json(obj: Any) -> FkAction:
    if not isinstance(obj, Mapping) or not {"algebra", "gens"} <= set(obj):
        raise ValidationError(
            'action JSON must be {"algebra": ..., "k": ..., "gens": [...]}'
        )
    alg = algebra_from_json(obj["algebra"])
    gens = obj["gens"]
    if not isinstance(gens, Sequence):
        raise ValidationError("gens must be a list of permutations")
    act = validate_action(alg, [tuple(p) for p in gens])
    if "k" in obj and obj["k"] != act.k:
        raise ValidationError(f'declared k={obj["k"]} but {act.k} generators given')
    return act


def word_from_json(obj: Any) -> Word:
    if not isinstance(obj, Sequence) or isinstance(obj, (str, bytes)):
        raise ValidationError("word JSON must be a list of signed integers")
    if not all(isinstance(v, int) for v in obj):
        raise ValidationError("word letters must be integers")
    return Word.of(obj)


# ---------------------------------------------------------------------------
# marked groups


def group_to_json(group: MarkedGroup) -> dict:
    return {
        "order": group.order,
        "mul": [list(row) for row in group.mul],
        "gens": list(group.gen_images),
    }


def _parse_builtin_group(text: str) -> MarkedGroup:
    parts = text.split(":")
    kind = parts[0]
    if kind == "cyclic":
        if len(parts) != 3:
            raise ValidationError('cyclic builtin is "cyclic:n:a1,...,ak"')
        n = int(parts[1])
        images = [int(v) for v in parts[2].split(",") if v != ""]
        if not images:
            raise ValidationError("cyclic builtin needs at least one generator")
        return cyclic_group(n, images)
    if kind == "sym":
        if len(parts) != 3:
            raise ValidationError('sym builtin is "sym:n:p1;...;pk"')
        n = int(parts[1])
        perms = []
        for chunk in parts[2].split(";"):
            perm = tuple(int(v) for v in chunk.split(","))
            if len(perm) != n:
                raise ValidationError(
                    f"permutation {chunk!r} does not have {n} entries"
                )
            perms.append(perm)
        group, _elements = permutation_marked_group(perms)
        return group
    raise ValidationError(f"unknown builtin group kind {kind!r}")


def group_from_json(obj: Any) -> MarkedGroup:
    """Parse a group from a table object or a builtin string."""
    if isinstance(obj, str):
        try:
            return _parse_builtin_group(obj)
        except ValueError as exc:
            raise ValidationError(f"bad builtin group {obj!r}: {exc}") from exc
    if isinstance(obj, Mapping) and {"mul", "gens"} <= set(obj):
        group = validate_marked_group(obj["mul"], obj["gens"])
        if "order" in obj and obj["order"] != group.order:
            raise ValidationError(
                f'declared order {obj["order"]} but table has {group.order} elements'
            )
        return group
    raise ValidationError(
        'group JSON must be {"order": ..., "mul": [...], "gens": [...]} or a builtin string'
    )


# ---------------------------------------------------------------------------
# partial isomorphisms


def partial_to_json(p: PartialIsomorphism) -> dict:
    return {
        "pairs": [
            {"source": sorted(s), "target": sorted(t)} for s, t in p.pairs
        ]
    }


def partial_from_json(
    source: MeasuredAlgebra, target: MeasuredAlgebra, obj: Any
) -> PartialIsomorphism:
    if isinstance(obj, Mapping) and "pairs" in obj:
        raw = obj["pairs"]
    elif isinstance(obj, Sequence) and not isinstance(obj, (str, bytes)):
        raw = obj
    else:
        raise ValidationError('partial JSON must be {"pairs": [...]} or a plain list')
    pairs = []
    for entry in raw:
        if isinstance(entry, Mapping):
            pairs.append((entry["source"], entry["target"]))
        elif isinstance(entry, Sequence) and len(entry) == 2:
            pairs.append((entry[0], entry[1]))
        else:
            raise ValidationError(
                'each pair must be {"source": [...], "target": [...]} or [src, tgt]'
            )
    return PartialIsomorphism.of(source, target, pairs)


# ---------------------------------------------------------------------------
# document rendering


def render_document(obj: Any) -> str:
    """The one canonical JSON serialization: sorted keys, two-space indent,
    trailing newline.  Byte-identical output for equal objects."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"
