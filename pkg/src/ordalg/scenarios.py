"""Built-in checks runnable from the command line.

Each scenario returns a JSON-ready report with one entry per assertion and
the computed values behind it.  Randomized scenarios draw from
``random.Random(seed)``; the default seed is ``DEFAULT_SEED``.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction
from typing import Callable

from . import families
from .algebra import AlgebraParams, ap_norm, gelfand_transform, lp_norm, order_convolve, sup_norm
from .multiplier import (
    Verdict,
    check_mphi_prime_surrogate,
    classify,
    default_witness_pool,
    operator_norm_lower_bound,
    tv_growth_exponent,
)
from .oracle import sample_compare
from .symfunc import INF, antiderivative_from_zero, format_rational, normalize, symbolically_equal, to_rational

DEFAULT_SEED = 20050601


class UnknownScenarioError(KeyError):
    pass


def _check(name: str, passed: bool, detail: str = "") -> dict:
    return {"name": name, "passed": bool(passed), "detail": detail}


def _q(params: dict, key: str, default) -> Fraction:
    return to_rational(params.get(key, default))


def _int(params: dict, key: str, default: int) -> int:
    return int(params.get(key, default))


def _report(scenario: str, params: dict, assertions: list[dict], values: dict) -> dict:
    return {
        "kind": "scenario",
        "scenario": scenario,
        "params": {k: str(v) for k, v in sorted(params.items())},
        "passed": all(a["passed"] for a in assertions),
        "assertions": assertions,
        "values": values,
    }


def prop2(params: dict, seed: int, threads: int = 1) -> dict:
    """Unit-ball elements of A_p have A_r norm below 2 and transform L_r norm below 1."""
    n = _int(params, "n", 50)
    if "p" in params or "r" in params:
        pairs = [(_q(params, "p", 1), _q(params, "r", Fraction(3, 2)))]
    else:
        pairs = [(Fraction(1), Fraction(3, 2)), (Fraction(3, 2), Fraction(3)), (Fraction(2), Fraction(4))]
    rng = random.Random(seed)
    worst_ap, worst_fhat, failures = 0.0, 0.0, 0
    for _ in range(n):
        for p, r in pairs:
            f = families.random_unit_ball_candidate(rng, p)
            f = f.scale(1.0 / ap_norm(f, p).value)
            ar = ap_norm(f, r).value
            fr = lp_norm(gelfand_transform(f), r).value
            worst_ap, worst_fhat = max(worst_ap, ar), max(worst_fhat, fr)
            failures += not (ar < 2 and fr < 1)
    return _report(
        "prop2",
        {"n": n, "pairs": ",".join(f"({p},{r})" for p, r in pairs)},
        [
            _check("ap-norm-r-below-2", worst_ap < 2, f"max |||f|||_r = {worst_ap:.12g}"),
            _check("transform-norm-r-below-1", worst_fhat < 1, f"max ||F||_r = {worst_fhat:.12g}"),
        ],
        {"max_ap_norm_r": worst_ap, "max_transform_norm_r": worst_fhat, "failures": failures, "cases": n * len(pairs)},
    )


def ex5i(params: dict, seed: int, threads: int = 1) -> dict:
    """The constant multiplier from A_r to A_p (r > p) is not a multiplier."""
    r, p = _q(params, "r", 3), _q(params, "p", Fraction(3, 2))
    ap = AlgebraParams(r, p)
    rep = classify(families.build((0, INF, [(1, 0)])), ap, threads=threads)
    w = rep.witness
    expected_alpha = (1 / r + 1 / p) / 2
    return _report(
        "ex5i",
        {"r": r, "p": p},
        [
            _check("not-multiplier", rep.verdict is Verdict.NOT_MULTIPLIER, rep.verdict.value),
            _check(
                "witness-tail-exponent",
                w is not None and w.failure.exponent == -expected_alpha * p,
                "no witness" if w is None else f"alpha {w.alpha}, |phi F|^p exponent {w.failure.exponent}",
            ),
            _check("necessary-all-hold", all(c.holds for c in rep.necessary), ", ".join(f"{c.name}={c.status.value}" for c in rep.necessary)),
        ],
        {"report": rep.to_json()},
    )


def ex5ii(params: dict, seed: int, threads: int = 1) -> dict:
    """A decaying multiplier certified by the L_v sufficient conditions."""
    r, p, eps = _q(params, "r", 3), _q(params, "p", Fraction(3, 2)), _q(params, "eps", Fraction(1, 3))
    ap = AlgebraParams(r, p)
    phi = families.decaying_multiplier(r, p, eps)
    rep = classify(phi, ap, threads=threads)
    sur = check_mphi_prime_surrogate(phi, ap, 1, ap.r_conj)
    return _report(
        "ex5ii",
        {"r": r, "p": p, "eps": eps},
        [
            _check("multiplier", rep.verdict is Verdict.MULTIPLIER, rep.verdict.value),
            _check("finite-upper-bound", rep.norm_upper_bound is not None and math.isfinite(rep.norm_upper_bound), str(rep.norm_upper_bound)),
            _check("derivative-tail-in-Lr'", sur.holds, sur.evidence),
        ],
        {"report": rep.to_json(), "surrogate": sur.to_json()},
    )


def ex8(params: dict, seed: int, threads: int = 1) -> dict:
    """A growing multiplier that passes the variation growth test but is not a multiplier."""
    r, p, eps = _q(params, "r", Fraction(3, 2)), _q(params, "p", 3), _q(params, "eps", Fraction(1, 6))
    ap = AlgebraParams(r, p)
    phi = families.growing_multiplier(r, p, eps)
    rep = classify(phi, ap, threads=threads)
    tv = tv_growth_exponent(phi)
    w = rep.witness
    tail = None
    if w is not None:
        last = normalize(phi * gelfand_transform(w.f)).pieces[-1]
        tail = [(t.coeff, t.exp, t.logpow) for t in last.terms]
    expected_tail = [(Fraction(1), -1 / p, 0)]
    return _report(
        "ex8",
        {"r": r, "p": p, "eps": eps},
        [
            _check("not-multiplier", rep.verdict is Verdict.NOT_MULTIPLIER, rep.verdict.value),
            _check("witness-tail", tail == expected_tail, f"phi F tail terms {tail}"),
            _check("necessary-all-hold", all(c.holds for c in rep.necessary), "; ".join(f"{c.name}={c.status.value}: {c.evidence}" for c in rep.necessary)),
            _check(
                "variation-growth-exponent",
                tv is not None and tv.exponent == 1 / r - 1 / p + eps,
                "zero" if tv is None else f"exponent {tv.exponent}",
            ),
        ],
        {"report": rep.to_json(), "tv_growth_exponent": None if tv is None else format_rational(tv.exponent)},
    )


def thm7_tent(params: dict, seed: int, threads: int = 1) -> dict:
    """The tent's A_r norm against the closed form."""
    a, b, c, r = (_q(params, k, d) for k, d in (("alpha", 1), ("beta", 2), ("gamma", 3), ("r", 2)))
    computed = ap_norm(families.tent(a, b, c), r).value
    expected = families.tent_ap_norm(a, b, c, r)
    rel = abs(computed - expected) / expected
    return _report(
        "thm7-tent",
        {"alpha": a, "beta": b, "gamma": c, "r": r},
        [_check("matches-closed-form", rel <= 1e-12, f"relative error {rel:.3e}")],
        {"computed": computed, "expected": expected, "relative_error": rel},
    )


def thm3_bound(params: dict, seed: int, threads: int = 1) -> dict:
    """Lower bound from a witness pool against the upper bound, and the sup-norm bound."""
    r, p, eps = _q(params, "r", 3), _q(params, "p", Fraction(3, 2)), _q(params, "eps", Fraction(1, 3))
    ap = AlgebraParams(r, p)
    phi = families.decaying_multiplier(r, p, eps)
    rep = classify(phi, ap, lower_bound=False)
    upper = rep.norm_upper_bound
    lower = operator_norm_lower_bound(phi, ap, default_witness_pool(ap), threads)
    sup = sup_norm(phi).value
    ok = upper is not None
    return _report(
        "thm3-bound",
        {"r": r, "p": p, "eps": eps},
        [
            _check("lower-below-upper", ok and lower <= upper, f"lower {lower:.12g}, upper {upper}"),
            _check("sup-below-twice-upper", ok and sup <= 2 * upper, f"sup {sup:.12g}"),
        ],
        {"lower": lower, "upper": upper, "sup": sup, "pool_size": len(default_witness_pool(ap))},
    )


def homomorphism(params: dict, seed: int, threads: int = 1) -> dict:
    """The transform of a convolution is the product of transforms."""
    n = _int(params, "n", 200)
    rng = random.Random(seed)
    kinds = ("unit", "grid", "sqrt")
    symbolic_fail, worst = 0, 0.0
    for i in range(n):
        kind = kinds[i % 3]
        f, g = families.random_family_fn(rng, kind), families.random_family_fn(rng, kind)
        # tails may grow, so integrate from 0 without requiring L1
        lhs = antiderivative_from_zero(order_convolve(f, g))
        rhs = antiderivative_from_zero(f) * antiderivative_from_zero(g)
        symbolic_fail += not symbolically_equal(lhs, rhs)
        worst = max(worst, sample_compare(lhs, rhs, 50, seed=i).max_deviation)
    return _report(
        "homomorphism",
        {"n": n},
        [
            _check("symbolic-equality", symbolic_fail == 0, f"{symbolic_fail} mismatches"),
            _check("sampled-deviation", worst < 1e-10, f"max deviation {worst:.3e}"),
        ],
        {"pairs": n, "symbolic_mismatches": symbolic_fail, "max_deviation": worst},
    )


def approx_identity(params: dict, seed: int, threads: int = 1) -> dict:
    """``|||f * e_n - f|||_p`` decreases over n = 2, 4, ..., 2**kmax."""
    p = _q(params, "p", 2)
    kmax = _int(params, "kmax", 15)
    f = families.box(1)
    values = []
    for k in range(1, kmax + 1):
        e_n = families.approximate_unit(2**k)
        values.append(ap_norm(order_convolve(f, e_n) - f, p).value)
    monotone = all(b <= a for a, b in zip(values, values[1:]))
    return _report(
        "approx-identity",
        {"p": p, "kmax": kmax},
        [
            _check("nonincreasing", monotone, ""),
            _check("below-0.01", min(values) < 0.01, f"min {min(values):.6g}"),
        ],
        {"n": [2**k for k in range(1, kmax + 1)], "ap_norm": values},
    )


SCENARIOS: dict[str, Callable[..., dict]] = {
    "prop2": prop2,
    "ex5i": ex5i,
    "ex5ii": ex5ii,
    "ex8": ex8,
    "thm7-tent": thm7_tent,
    "thm3-bound": thm3_bound,
    "homomorphism": homomorphism,
    "approx-identity": approx_identity,
}


def run_scenario(scenario_id: str, params: dict | None = None, seed: int = DEFAULT_SEED, threads: int = 1) -> dict:
    try:
        fn = SCENARIOS[scenario_id]
    except KeyError:
        raise UnknownScenarioError(f"unknown scenario {scenario_id!r}; choose from {', '.join(SCENARIOS)}") from None
    report = fn(dict(params or {}), seed, threads)
    report["seed"] = seed
    return report
