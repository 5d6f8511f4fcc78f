"""Command-line front end.

Exit codes: 0 affirmative verdict or plain success, 1 negative verdict
(not congruent, no certificate, no witness, empty scan), 2 usage or input
error, 3 inapplicable bad-prime configuration.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .arith import is_prime
from .congruence import (
    BoundPolicy,
    CongruenceParams,
    PRESET_BOUND,
    Verdict,
    certify_non_isogenous,
    verify_congruence,
)
from .frobenius import ApCache, ap, ap_table
from .localdata import (
    NotMinimalError,
    UnsupportedPrimeError,
    bad_primes,
    conductor,
    irreducibility_certificate,
    reduction_type,
)
from .model import (
    ModelParseError,
    SingularModelError,
    invariants,
    minimal_model,
    parse_model,
    quadratic_twist,
)
from .scan import DatasetError, load_curves, scan_records

CACHE_ENV = "CONGRUE_CACHE_DIR"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2
EXIT_INAPPLICABLE = 3


def _cache_from(args) -> ApCache | None:
    path = getattr(args, "cache_dir", None) or os.environ.get(CACHE_ENV)
    return ApCache(path) if path else None


def _emit(args, payload: dict, lines: list[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _bound_policy(args) -> BoundPolicy:
    if getattr(args, "paper_bound", None) is not None:
        return BoundPolicy.preset(args.paper_bound)
    if getattr(args, "bound", None) is not None:
        return BoundPolicy.explicit(args.bound)
    return BoundPolicy.computed()


def _cmd_invariants(args) -> int:
    inv = invariants(parse_model(args.curve))
    payload = {
        "b2": inv.b2,
        "b4": inv.b4,
        "b6": inv.b6,
        "b8": inv.b8,
        "c4": inv.c4,
        "c6": inv.c6,
        "disc": inv.disc,
        "j": f"{inv.j.numerator}/{inv.j.denominator}",
    }
    _emit(args, payload, [f"{k} = {v}" for k, v in payload.items()])
    return EXIT_OK


def _cmd_minimal(args) -> int:
    mm, t = minimal_model(parse_model(args.curve))
    payload = {
        "minimal": str(mm),
        "u": str(t.u),
        "r": str(t.r),
        "s": str(t.s),
        "t": str(t.t),
    }
    _emit(args, payload, [f"minimal = {mm}", f"(u, r, s, t) = ({t.u}, {t.r}, {t.s}, {t.t})"])
    return EXIT_OK


def _cmd_localdata(args) -> int:
    mm = minimal_model(parse_model(args.curve))[0]
    rows = []
    for q in bad_primes(mm):
        ld = reduction_type(mm, q)
        rows.append(
            {
                "q": q,
                "kind": ld.kind.value,
                "v_delta": ld.v_delta,
                "v_c4": ld.v_c4,
                "f": ld.f,
                "kodaira": ld.kodaira,
                "potentially_good": ld.potentially_good,
                "phi_order": ld.phi_order,
            }
        )
    lines = [f"minimal model {mm}"] + [
        f"q={r['q']}: {r['kind']}, v(disc)={r['v_delta']}, f={r['f']}, "
        f"{r['kodaira']}" + (f", phi={r['phi_order']}" if r["phi_order"] else "")
        for r in rows
    ]
    _emit(args, {"minimal": str(mm), "local": rows}, lines)
    return EXIT_OK


def _cmd_conductor(args) -> int:
    n = conductor(minimal_model(parse_model(args.curve))[0])
    _emit(args, {"conductor": n}, [str(n)])
    return EXIT_OK


def _cmd_ap(args) -> int:
    if not is_prime(args.l):
        raise ValueError(f"--l must be prime, got {args.l}")
    a = ap(parse_model(args.curve), args.l)
    _emit(args, {"l": args.l, "ap": a}, [str(a)])
    return EXIT_OK


def _cmd_aptable(args) -> int:
    table = ap_table(parse_model(args.curve), args.bound, _cache_from(args))
    payload = {"curve": "[" + ",".join(map(str, table.ainvs)) + "]",
               "bound": args.bound,
               "ap": [[l, a] for l, a in table.items()]}
    _emit(args, payload, [f"{l}\t{a}" for l, a in table.items()])
    return EXIT_OK


def _cmd_congruent(args) -> int:
    params = CongruenceParams(
        p=args.p,
        bound_policy=_bound_policy(args),
        include_l_equals_p=not args.exclude_lp,
    )
    report = verify_congruence(
        parse_model(args.curve_a), parse_model(args.curve_b), params, _cache_from(args)
    )
    d = report.to_json_dict()
    lines = [
        f"verdict: {d['verdict']}",
        f"p = {d['p']}, M = {d['M']}, bound = {d['bound']} ({d['policy']})",
        f"checked {d['checked']} primes, skipped {len(d['skipped'])}",
    ]
    for row in d["aux"]:
        lines.append(
            f"aux q={row['q']}: eps={row['eps']}, a_q={row['a_good']}, "
            f"{'holds' if row['holds'] else 'fails'}"
        )
    for w in d["witnesses"]:
        lines.append(f"witness l={w['l']}: {w['a_first']} vs {w['a_second']} ({w['check']})")
    for cert in d["certificates"]:
        if cert:
            lines.append(f"irreducible: q={cert['q']}, e={cert['e']} ({cert['reason']})")
    for note in d["notes"]:
        lines.append(f"note: {note}")
    if d["inapplicable_reason"]:
        lines.append(f"inapplicable: {d['inapplicable_reason']}")
    _emit(args, d, lines)
    if report.verdict is Verdict.INAPPLICABLE:
        return EXIT_INAPPLICABLE
    if report.verdict is Verdict.NOT_CONGRUENT:
        return EXIT_NEGATIVE
    return EXIT_OK


def _cmd_nonisogenous(args) -> int:
    witness = certify_non_isogenous(
        parse_model(args.curve_a), parse_model(args.curve_b), args.bound
    )
    if witness is None:
        _emit(args, {"witness": None}, ["no witness found (inconclusive)"])
        return EXIT_NEGATIVE
    a = ap(parse_model(args.curve_a), witness)
    b = ap(parse_model(args.curve_b), witness)
    _emit(
        args,
        {"witness": witness, "a_first": a, "a_second": b},
        [f"non-isogenous: a_{witness} = {a} vs {b}"],
    )
    return EXIT_OK


def _cmd_irreducible(args) -> int:
    cert = irreducibility_certificate(parse_model(args.curve), args.p)
    if cert is None:
        _emit(args, {"certificate": None}, ["no certificate (inconclusive)"])
        return EXIT_NEGATIVE
    _emit(
        args,
        {"certificate": {"q": cert.q, "e": cert.e, "p": cert.p, "reason": cert.reason}},
        [f"irreducible mod {cert.p}: q={cert.q}, e={cert.e}", cert.reason],
    )
    return EXIT_OK


def _cmd_twist(args) -> int:
    tw = quadratic_twist(parse_model(args.curve), args.d)
    _emit(args, {"twist": str(tw)}, [str(tw)])
    return EXIT_OK


def _cmd_scan(args) -> int:
    records = load_curves(args.file)
    params = CongruenceParams(p=args.p, bound_policy=_bound_policy(args))
    pairs, excluded = scan_records(records, args.p, params, args.probes)
    payload = [pair.to_json_dict() for pair in pairs]
    print(json.dumps(payload, indent=2, sort_keys=True))
    for row in excluded:
        print(f"excluded {row['labels']}: {row['reason']}", file=sys.stderr)
    return EXIT_OK if pairs else EXIT_NEGATIVE


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="congrue",
        description="Exact mod-p congruence checks between rational elliptic curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")

    bounds = argparse.ArgumentParser(add_help=False)
    bounds.add_argument("--bound", type=int, help="explicit trace-comparison bound")
    bounds.add_argument(
        "--paper-bound",
        type=int,
        nargs="?",
        const=PRESET_BOUND,
        help=f"use a fixed preset bound (default {PRESET_BOUND}) instead of the computed one",
    )

    s = sub.add_parser("invariants", parents=[common], help="b-, c-invariants, disc, j")
    s.add_argument("curve")
    s.set_defaults(handler=_cmd_invariants)

    s = sub.add_parser("minimal", parents=[common], help="global minimal model")
    s.add_argument("curve")
    s.set_defaults(handler=_cmd_minimal)

    s = sub.add_parser("localdata", parents=[common], help="reduction data at bad primes")
    s.add_argument("curve")
    s.set_defaults(handler=_cmd_localdata)

    s = sub.add_parser("conductor", parents=[common], help="conductor of the curve")
    s.add_argument("curve")
    s.set_defaults(handler=_cmd_conductor)

    s = sub.add_parser("ap", parents=[common], help="trace of Frobenius at one prime")
    s.add_argument("curve")
    s.add_argument("--l", type=int, required=True)
    s.set_defaults(handler=_cmd_ap)

    s = sub.add_parser("aptable", parents=[common], help="traces for all primes up to a bound")
    s.add_argument("curve")
    s.add_argument("--bound", type=int, required=True)
    s.add_argument("--cache-dir", help=f"trace cache directory (default ${CACHE_ENV})")
    s.set_defaults(handler=_cmd_aptable)

    s = sub.add_parser("congruent", parents=[common, bounds], help="mod-p congruence verdict")
    s.add_argument("curve_a")
    s.add_argument("curve_b")
    s.add_argument("--p", type=int, required=True)
    group = s.add_mutually_exclusive_group()
    group.add_argument("--include-lp", dest="exclude_lp", action="store_false",
                       help="compare traces at l = p too (default)")
    group.add_argument("--exclude-lp", dest="exclude_lp", action="store_true",
                       help="skip l = p in the comparison loop")
    s.add_argument("--cache-dir", help=f"trace cache directory (default ${CACHE_ENV})")
    s.set_defaults(handler=_cmd_congruent, exclude_lp=False)

    s = sub.add_parser("nonisogenous", parents=[common], help="integer-trace isogeny refutation")
    s.add_argument("curve_a")
    s.add_argument("curve_b")
    s.add_argument("--bound", type=int, required=True)
    s.set_defaults(handler=_cmd_nonisogenous)

    s = sub.add_parser("irreducible", parents=[common], help="mod-p irreducibility certificate")
    s.add_argument("curve")
    s.add_argument("--p", type=int, required=True)
    s.set_defaults(handler=_cmd_irreducible)

    s = sub.add_parser("twist", parents=[common], help="minimal model of a quadratic twist")
    s.add_argument("curve")
    s.add_argument("--d", type=int, required=True)
    s.set_defaults(handler=_cmd_twist)

    s = sub.add_parser("scan", parents=[common, bounds], help="search a dataset for congruent pairs")
    s.add_argument("file")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--probes", type=int, default=25, help="good probe primes per curve")
    s.set_defaults(handler=_cmd_scan)

    return parser


def run(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except (
        ModelParseError,
        SingularModelError,
        DatasetError,
        NotMinimalError,
        UnsupportedPrimeError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
