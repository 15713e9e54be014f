"""Command-line driver emitting deterministic JSON reports.

Every subcommand reads its objects as inline JSON, a path to a JSON file,
or (for groups) a builtin string, and writes exactly one JSON document to
stdout: sorted keys, two-space indent, rationals as "num/den" strings.
Identical inputs produce byte-identical output.  Exit codes: 0 success,
2 domain validation failure (with a machine-readable error object on
stdout), 64 usage error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from . import jsonio
from .action import (
    check_permutation,
    equal_refine_action,
    tensor_trivial,
    uniform_distance,
    uniform_distance_tuples,
)
from .algebra import dist_max, dist_partition
from .audit import (
    axiom_residual,
    check_C1,
    ec_in_extension_check,
    search_C2_witness,
)
from .constructions import (
    approx_conjugacy_search,
    embed_into_profinite_tensor,
    embed_transitive_into_quotient,
    eppa_extend,
    ergodize,
    joint_quotient,
    match_partitions,
    quotient_action,
)
from .errors import ArityMismatch, PmplabError, ValidationError
from .modeltheory import (
    independence_deficiency,
    type_distance_max,
    type_distance_tv,
)

USAGE_EXIT = 64
VALIDATION_EXIT = 2


@dataclass(frozen=True)
class RunConfig:
    """Per-invocation settings shared by all subcommands.

    seed is accepted for reproducibility bookkeeping; every search in the
    library is already deterministic, so the seed influences nothing and
    identical inputs give identical bytes regardless.  threads caps the
    worker count for candidate evaluation; evaluation is sequential, which
    satisfies any cap without affecting results."""

    seed: int
    k: Optional[int]
    max_refine: int
    metric: str
    output: Optional[str]
    threads: int


class _Parser(argparse.ArgumentParser):
    """argparse with the usage-error exit code fixed at 64."""

    def error(self, message: str):  # noqa: D401 - argparse hook
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _load(arg: str) -> Any:
    """Interpret a CLI object argument.

    Inline JSON when it starts with a brace or bracket, a builtin group
    string when it starts with a known kind, otherwise a path to a JSON
    file."""
    s = arg.strip()
    if s.startswith("{") or s.startswith("["):
        try:
            return json.loads(s)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad inline JSON: {exc}") from exc
    if s.split(":", 1)[0] in ("cyclic", "sym"):
        return s
    if os.path.exists(s):
        with open(s, "r", encoding="utf-8") as fh:
            text = fh.read()
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"bad JSON in file {s}: {exc}") from exc
    raise ValidationError(
        f"cannot interpret {arg!r}: not inline JSON, a builtin group, or a readable file"
    )


def _threads_from_env() -> int:
    raw = os.environ.get("PMPLAB_THREADS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValidationError(
            f"PMPLAB_THREADS must be an integer, got {raw!r}"
        ) from exc
    if value < 1:
        raise ValidationError(f"PMPLAB_THREADS must be >= 1, got {value}")
    return value


def _check_k(config: RunConfig, actual: int) -> None:
    if config.k is not None and config.k != actual:
        raise ArityMismatch(
            f"--k {config.k} does not match the object's {actual} generators"
        )


def _fr(value: Fraction) -> str:
    return jsonio.format_rational(value)


def _dec(value: Fraction) -> str:
    return jsonio.decimal_rendering(value)


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_gen_quotient(args, config: RunConfig) -> dict:
    group = jsonio.group_from_json(_load(args.group))
    _check_k(config, group.k)
    return jsonio.action_to_json(quotient_action(group))


def _cmd_joint_quotient(args, config: RunConfig) -> dict:
    g1 = jsonio.group_from_json(_load(args.group1))
    g2 = jsonio.group_from_json(_load(args.group2))
    _check_k(config, g1.k)
    jq = joint_quotient(g1, g2)
    return {
        "group": jsonio.group_to_json(jq.group),
        "proj1": list(jq.proj1),
        "proj2": list(jq.proj2),
    }


def _cmd_tensor(args, config: RunConfig) -> dict:
    act = jsonio.action_from_json(_load(args.action))
    _check_k(config, act.k)
    factor = jsonio.algebra_from_json(_load(args.factor))
    return jsonio.action_to_json(tensor_trivial(act, factor))


def _cmd_refine(args, config: RunConfig) -> dict:
    act = jsonio.action_from_json(_load(args.action))
    _check_k(config, act.k)
    if args.parts < 1:
        raise ValidationError(f"parts must be >= 1, got {args.parts}")
    refined, projection = equal_refine_action(act, args.parts)
    return {
        "action": jsonio.action_to_json(refined),
        "projection": list(projection),
    }


def _cmd_dist(args, config: RunConfig) -> dict:
    alg = jsonio.algebra_from_json(_load(args.algebra))
    a = jsonio.tuple_from_json(alg, _load(args.a))
    b = jsonio.tuple_from_json(alg, _load(args.b))
    return {
        "dist_max": _fr(dist_max(a, b)),
        "dist_partition": _fr(dist_partition(a, b)),
    }


def _cmd_typedist(args, config: RunConfig) -> dict:
    alg = jsonio.algebra_from_json(_load(args.algebra))
    base = jsonio.tuple_from_json(alg, _load(args.base))
    b = jsonio.tuple_from_json(alg, _load(args.b))
    c = jsonio.tuple_from_json(alg, _load(args.c))
    fn = type_distance_tv if config.metric == "tv" else type_distance_max
    value = fn(base, b, c)
    return {"metric": config.metric, "distance": _fr(value), "distance_decimal": _dec(value)}


def _cmd_indep(args, config: RunConfig) -> dict:
    alg = jsonio.algebra_from_json(_load(args.algebra))
    base = jsonio.tuple_from_json(alg, _load(args.base))
    b = jsonio.tuple_from_json(alg, _load(args.b))
    c = jsonio.tuple_from_json(alg, _load(args.c))
    value = independence_deficiency(base, b, c)
    return {"deficiency": _fr(value), "deficiency_decimal": _dec(value)}


def _parse_perm_arg(alg, obj) -> tuple:
    if not isinstance(obj, list):
        raise ValidationError("permutation argument must be a JSON array")
    perm = tuple(obj)
    check_permutation(alg, perm)
    return perm


def _cmd_delta(args, config: RunConfig) -> dict:
    alg = jsonio.algebra_from_json(_load(args.algebra))
    g = _load(args.g)
    h = _load(args.h)
    if g and isinstance(g[0], list):
        if not (h and isinstance(h[0], list)) or len(g) != len(h):
            raise ArityMismatch("both sides must be equal-length lists of permutations")
        gs = [_parse_perm_arg(alg, p) for p in g]
        hs = [_parse_perm_arg(alg, p) for p in h]
        value = uniform_distance_tuples(alg, gs, hs)
    else:
        value = uniform_distance(alg, _parse_perm_arg(alg, g), _parse_perm_arg(alg, h))
    return {"delta": _fr(value)}


def _cmd_match(args, config: RunConfig) -> dict:
    alg = jsonio.algebra_from_json(_load(args.algebra))
    a = jsonio.tuple_from_json(alg, _load(args.a))
    b = jsonio.tuple_from_json(alg, _load(args.b))
    m = match_partitions(a, b)
    return {
        "refined": jsonio.algebra_to_json(m.refined),
        "projection": list(m.projection),
        "perm": list(m.perm),
        "dist_partition": _fr(m.dp),
    }


def _cmd_eppa(args, config: RunConfig) -> dict:
    alg = jsonio.algebra_from_json(_load(args.algebra))
    partials = [
        jsonio.partial_from_json(alg, alg, _load(p)) for p in args.partials
    ]
    res = eppa_extend(alg, partials)
    return {
        "algebra": jsonio.algebra_to_json(res.algebra),
        "action": jsonio.action_to_json(res.action),
        "embedding": jsonio.partial_to_json(res.embedding),
    }


def _cmd_ergodize(args, config: RunConfig) -> dict:
    act = jsonio.action_from_json(_load(args.action))
    _check_k(config, act.k)
    fixed = jsonio.partition_from_json(act.algebra, _load(args.fixed))
    res = ergodize(act, fixed)
    return {
        "action": jsonio.action_to_json(res.action),
        "modifications": res.modifications,
    }


def _cmd_embed(args, config: RunConfig) -> dict:
    act = jsonio.action_from_json(_load(args.action))
    _check_k(config, act.k)
    if args.mode == "transitive":
        res = embed_transitive_into_quotient(act)
    else:
        res = embed_into_profinite_tensor(act)
    out = {
        "group": jsonio.group_to_json(res.group),
        "elements": [list(e) for e in res.elements],
        "target": jsonio.action_to_json(res.target),
        "sigma": jsonio.partial_to_json(res.sigma),
    }
    if res.base_factor is not None:
        out["base_factor"] = jsonio.algebra_to_json(res.base_factor)
    return out


def _cmd_conjsearch(args, config: RunConfig) -> dict:
    a1 = jsonio.action_from_json(_load(args.action1))
    a2 = jsonio.action_from_json(_load(args.action2))
    _check_k(config, a1.k)
    cert = approx_conjugacy_search(
        a1, a2, max_refine=config.max_refine, beam_width=args.beam
    )
    return {
        "eps": _fr(cert.eps),
        "eps_decimal": _dec(cert.eps),
        "mapping": list(cert.iso.mapping),
        "refined_atoms": cert.act1_refined.algebra.size,
        "exhausted": cert.exhausted,
    }


def _audit_inputs(args):
    act = jsonio.action_from_json(_load(args.action))
    a = jsonio.tuple_from_json(act.algebra, _load(args.a))
    bs = [jsonio.tuple_from_json(act.algebra, _load(b)) for b in args.bs]
    return act, a, bs


def _cmd_audit_c1(args, config: RunConfig) -> dict:
    act, a, bs = _audit_inputs(args)
    _check_k(config, act.k)
    eps = jsonio.parse_rational(args.eps)
    report = check_C1(act, a, bs, eps, metric=config.metric)
    return {
        "xi": [_fr(x) for x in report.xi],
        "xi_decimal": [_dec(x) for x in report.xi],
        "psi": [_fr(p) for p in report.psi],
        "psi_decimal": [_dec(p) for p in report.psi],
        "eps": _fr(report.eps),
        "metric": config.metric,
        "satisfied": report.satisfied,
    }


def _cmd_audit_c2(args, config: RunConfig) -> dict:
    act, a, bs = _audit_inputs(args)
    _check_k(config, act.k)
    eps = jsonio.parse_rational(args.eps)
    res = search_C2_witness(act, a, bs, eps, max_refine=config.max_refine)
    w = res.witness
    return {
        "found": res.found,
        "c": jsonio.tuple_to_json(w.c),
        "distance": _fr(w.distance),
        "distance_decimal": _dec(w.distance),
        "refinement_depth": w.refinement_depth,
    }


def _cmd_audit_residual(args, config: RunConfig) -> dict:
    act, a, bs = _audit_inputs(args)
    _check_k(config, act.k)
    value = axiom_residual(act, a, bs, max_refine=config.max_refine)
    return {"residual": _fr(value), "residual_decimal": _dec(value)}


def _cmd_audit_ec(args, config: RunConfig) -> dict:
    small = jsonio.action_from_json(_load(args.small))
    big = jsonio.action_from_json(_load(args.big))
    _check_k(config, small.k)
    embed = jsonio.partial_from_json(small.algebra, big.algebra, _load(args.embed))
    anchors = jsonio.tuple_from_json(small.algebra, _load(args.a))
    bs = jsonio.tuple_from_json(big.algebra, _load(args.bs))
    words_raw = _load(args.words)
    if not isinstance(words_raw, list):
        raise ValidationError("words must be a JSON array of words")
    words = [jsonio.word_from_json(w) for w in words_raw]
    eps = jsonio.parse_rational(args.eps)
    res = ec_in_extension_check(
        small, big, embed, anchors, bs, words, eps, max_refine=config.max_refine
    )
    w = res.witness
    return {
        "found": res.found,
        "cs": jsonio.tuple_to_json(w.cs),
        "discrepancy": _fr(w.discrepancy),
        "discrepancy_decimal": _dec(w.discrepancy),
        "refinement_depth": w.refinement_depth,
    }


# ---------------------------------------------------------------------------
# parser assembly and dispatch


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="recorded search seed")
    common.add_argument("--k", type=int, default=None, help="expected generator count")
    common.add_argument("--max-refine", type=int, default=1, dest="max_refine")
    common.add_argument("--metric", choices=("tv", "max"), default="tv")
    common.add_argument("--out", default=None, help="also write the document here")

    parser = _Parser(prog="pmplab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, handler, *positionals, **kwargs):
        p = sub.add_parser(name, parents=[common], **kwargs)
        for pos in positionals:
            if isinstance(pos, tuple):
                p.add_argument(pos[0], **pos[1])
            else:
                p.add_argument(pos)
        p.set_defaults(handler=handler)
        return p

    add("gen-quotient", _cmd_gen_quotient, "group",
        help="quotient action of a marked group")
    add("joint-quotient", _cmd_joint_quotient, "group1", "group2",
        help="subgroup of a product generated by paired generators")
    add("tensor", _cmd_tensor, "action", "factor",
        help="tensor an action with a trivial factor")
    add("refine", _cmd_refine, "action",
        ("parts", {"type": int}),
        help="split every atom into equal parts")
    add("dist", _cmd_dist, "algebra", "a", "b",
        help="max and partition distances between tuples")
    add("typedist", _cmd_typedist, "algebra", "base", "b", "c",
        help="type distance over a base tuple")
    add("indep", _cmd_indep, "algebra", "base", "b", "c",
        help="conditional independence deficiency")
    add("delta", _cmd_delta, "algebra", "g", "h",
        help="uniform distance between automorphisms")
    add("match", _cmd_match, "algebra", "a", "b",
        help="automorphism carrying one tuple onto an equidistributed one")
    add("eppa", _cmd_eppa, "algebra",
        ("partials", {"nargs": "+"}),
        help="extend partial automorphisms over an equal-atom algebra")
    add("ergodize", _cmd_ergodize, "action", "fixed",
        help="make an action transitive fixing a block partition")
    p_embed = add("embed", _cmd_embed, "action",
                  help="embed into a quotient (or quotient tensor trivial) action")
    p_embed.add_argument("--mode", choices=("transitive", "profinite"),
                         default="profinite")
    p_conj = add("conjsearch", _cmd_conjsearch, "action1", "action2",
                 help="search for a near-conjugacy with an exact certificate")
    p_conj.add_argument("--beam", type=int, default=16)
    add("audit-c1", _cmd_audit_c1, "action", "a", "eps",
        ("bs", {"nargs": "+"}),
        help="first closure condition quantities")
    add("audit-c2", _cmd_audit_c2, "action", "a", "eps",
        ("bs", {"nargs": "+"}),
        help="witness search for the second closure condition")
    add("audit-residual", _cmd_audit_residual, "action", "a",
        ("bs", {"nargs": "+"}),
        help="certified upper bound for the closure axiom residual")
    add("audit-ec", _cmd_audit_ec, "small", "big", "embed", "a", "bs",
        "words", "eps",
        help="imitate an extension tuple inside the small system")
    return parser


def cli_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        code = exc.code
        return int(code) if code else 0
    try:
        config = RunConfig(
            seed=args.seed,
            k=args.k,
            max_refine=args.max_refine,
            metric=args.metric,
            output=args.out,
            threads=_threads_from_env(),
        )
        if config.max_refine < 1:
            raise ValidationError(
                f"--max-refine must be >= 1, got {config.max_refine}"
            )
        payload = args.handler(args, config)
        document = jsonio.render_document(payload)
        sys.stdout.write(document)
        if config.output:
            with open(config.output, "w", encoding="utf-8") as fh:
                fh.write(document)
        return 0
    except PmplabError as exc:
        error: dict[str, Any] = {
            "type": type(exc).__name__,
            "message": str(exc),
        }
        element = getattr(exc, "element", None)
        if element is not None:
            error["element"] = list(element)
        sys.stdout.write(jsonio.render_document({"error": error}))
        return VALIDATION_EXIT
    except (ValueError, OSError) as exc:
        sys.stdout.write(
            jsonio.render_document(
                {"error": {"type": type(exc).__name__, "message": str(exc)}}
            )
        )
        return VALIDATION_EXIT


def entry() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    entry()
