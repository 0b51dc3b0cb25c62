"""``ordalg`` command line.

Exit codes: 0 on success or a reached verdict, 2 when classification is
Undetermined, 1 on any error (and when a scenario assertion fails).
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .algebra import AlgebraParams, ap_norm, gelfand_transform, lp_norm, order_convolve, to_exponent
from .dsl import parse_function, to_dsl
from .multiplier import Verdict, classify, witness_search
from .oracle import DEFAULT_REL_TOL, tolerance
from .scenarios import DEFAULT_SEED, SCENARIOS, run_scenario
from .symfunc import evaluate, format_rational, normalize, to_rational

EXIT_OK, EXIT_ERROR, EXIT_UNDETERMINED = 0, 1, 2


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _key_value(text: str) -> tuple[str, str]:
    key, sep, value = text.partition("=")
    if not sep or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), value.strip()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit a JSON report")
    common.add_argument("--tol", type=_positive_float, default=DEFAULT_REL_TOL, help="quadrature relative tolerance (default %(default)g)")
    common.add_argument("--threads", type=int, default=1, help="worker threads for witness pools (default 1)")

    parser = argparse.ArgumentParser(prog="ordalg", description="Order-convolution algebra toolkit.", allow_abbrev=False)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate a function at a point", allow_abbrev=False)
    p.add_argument("--fn", required=True)
    p.add_argument("--at", required=True)

    p = sub.add_parser("convolve", parents=[common], help="order convolution f * g", allow_abbrev=False)
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)

    p = sub.add_parser("transform", parents=[common], help="Gelfand transform (integral from 0)", allow_abbrev=False)
    p.add_argument("--fn", required=True)

    p = sub.add_parser("norm", parents=[common], help="L_p norm, or the A_p norm with --ap", allow_abbrev=False)
    p.add_argument("--fn", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--ap", action="store_true")

    for name, text in (("classify", "classify phi as an (A_r, A_p) multiplier"), ("witness", "search for a non-multiplier witness")):
        p = sub.add_parser(name, parents=[common], help=text, allow_abbrev=False)
        p.add_argument("--phi", required=True)
        p.add_argument("--r", required=True)
        p.add_argument("--p", required=True)

    p = sub.add_parser("scenario", parents=[common], help="run a built-in check", allow_abbrev=False)
    p.add_argument("--id", required=True, choices=sorted(SCENARIOS))
    p.add_argument("--params", type=_key_value, nargs="+", action="extend", default=[], metavar="KEY=VALUE")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized scenarios (default %(default)s)")
    return parser


def _run(args) -> tuple[dict, str, int]:
    """Returns (json report, text report, exit code)."""
    if args.command == "eval":
        f = parse_function(args.fn)
        x = to_rational(args.at)
        value = evaluate(f, x)
        return {"kind": "eval", "x": format_rational(x), "value": value}, f"{value!r}", EXIT_OK

    if args.command == "convolve":
        h = order_convolve(parse_function(args.f), parse_function(args.g))
        return {"kind": "convolve", "result": h.to_json(), "dsl": to_dsl(h)}, to_dsl(h), EXIT_OK

    if args.command == "transform":
        big_f = gelfand_transform(parse_function(args.fn))
        return {"kind": "transform", "result": big_f.to_json(), "dsl": to_dsl(big_f)}, to_dsl(big_f), EXIT_OK

    if args.command == "norm":
        f = parse_function(args.fn)
        p = to_exponent(args.p)
        norm = ap_norm(f, p) if args.ap else lp_norm(f, p)
        label = f"|||f|||_{args.p}" if args.ap else f"||f||_{args.p}"
        if norm.finite:
            text = f"{label} = {norm.value!r} ({norm.method.value}, error bound {norm.error_bound:.3g})"
        else:
            d = norm.divergence
            text = f"{label} = inf (divergent at {d.endpoint.value}, exponent {d.exponent})"
        report = {"kind": "norm", "p": str(args.p), "ap": bool(args.ap), **norm.to_json()}
        return report, text, EXIT_OK

    if args.command in ("classify", "witness"):
        phi = parse_function(args.phi)
        params = AlgebraParams(args.r, args.p)
        if args.command == "witness":
            w = witness_search(phi, params)
            report = {"kind": "witness", "params": params.to_json(), "witness": None if w is None else w.to_json()}
            if w is None:
                return report, "no witness found", EXIT_OK
            text = f"alpha = {w.alpha}: |phi F|^p has exponent {w.failure.exponent} at {w.failure.endpoint.value}\nf = {to_dsl(w.f)}"
            return report, text, EXIT_OK
        rep = classify(phi, params, threads=args.threads)
        lines = [f"verdict: {rep.verdict.value} ({rep.regime.value})"]
        for c in rep.necessary + tuple(c for c in rep.sufficient if c not in rep.necessary):
            lines.append(f"  {c.name}: {c.status.value} - {c.evidence}")
        if rep.witness is not None:
            lines.append(f"  witness alpha = {rep.witness.alpha}, f = {to_dsl(rep.witness.f)}")
        if rep.norm_upper_bound is not None:
            lines.append(f"  norm upper bound: {rep.norm_upper_bound!r}")
        if rep.norm_lower_bound is not None:
            lines.append(f"  norm lower bound: {rep.norm_lower_bound!r}")
        code = EXIT_UNDETERMINED if rep.verdict is Verdict.UNDETERMINED else EXIT_OK
        return {"kind": "classify", **rep.to_json()}, "\n".join(lines), code

    if args.command == "scenario":
        report = run_scenario(args.id, dict(args.params), args.seed, args.threads)
        lines = [f"scenario {args.id} (seed {args.seed}): {'PASS' if report['passed'] else 'FAIL'}"]
        for a in report["assertions"]:
            lines.append(f"  {'PASS' if a['passed'] else 'FAIL'} {a['name']}: {a['detail']}")
        return report, "\n".join(lines), EXIT_OK if report["passed"] else EXIT_ERROR

    raise AssertionError(args.command)


def _default(o):
    if isinstance(o, Fraction):
        return format_rational(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with tolerance(args.tol):
            report, text, code = _run(args)
    except (ValueError, KeyError, ArithmeticError) as exc:
        if args.json:
            print(json.dumps({"kind": "error", "error": type(exc).__name__, "message": str(exc)}))
        else:
            print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.json:
        print(json.dumps(report, default=_default, sort_keys=True))
    else:
        print(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
