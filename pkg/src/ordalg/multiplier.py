"""Condition checks, verdicts, witnesses and norm bounds for (A_r, A_p) multipliers.

A multiplier is a function ``phi`` on (0, inf) with ``phi * F`` the transform
of an A_p element whenever ``F`` is the transform of an A_r element.  Each
check returns a ``ConditionResult``; a ``Fails`` always carries an exact
certificate (a divergent exponent, an unbounded leading behaviour, or a jump).
"""

from __future__ import annotations

import contextvars
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from . import families
from .algebra import (
    INF,
    AlgebraParams,
    NormValue,
    Regime,
    ap_norm,
    format_exponent,
    gelfand_transform,
    lp_norm,
    reciprocal,
    sup_norm,
    to_exponent,
)
from .symfunc import (
    Endpoint,
    LeadingBehavior,
    PiecewiseFn,
    differentiate,
    format_rational,
    leading_behavior,
    lp_divergence,
    normalize,
    restrict,
    sum_at,
    to_rational,
)


class Status(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNKNOWN = "Unknown"


class Verdict(str, Enum):
    MULTIPLIER = "Multiplier"
    NOT_MULTIPLIER = "NotMultiplier"
    UNDETERMINED = "Undetermined"


class InconsistentVerdictError(RuntimeError):
    """A sufficient-condition verdict collided with a non-multiplier witness."""


def _json_number(x):
    if isinstance(x, Fraction):
        return format_rational(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return x


def _txt(q) -> str:
    return "inf" if q == INF else str(q)


def _behavior_json(lb: LeadingBehavior | None) -> dict | None:
    if lb is None:
        return None
    return {
        "endpoint": lb.endpoint.value,
        "exponent": format_rational(lb.exponent),
        "log_power": format_rational(Fraction(lb.log_power)),
        "coeff": lb.coeff,
    }


@dataclass(frozen=True)
class ConditionResult:
    name: str
    status: Status
    evidence: str
    data: dict = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.status is Status.HOLDS

    @property
    def fails(self) -> bool:
        return self.status is Status.FAILS

    def to_json(self) -> dict:
        return {"name": self.name, "status": self.status.value, "evidence": self.evidence, "data": self.data}


@dataclass(frozen=True)
class Witness:
    """``f`` in A_r with ``phi * F`` outside L_p."""

    f: PiecewiseFn
    alpha: Fraction
    failure: object  # Divergence

    def to_json(self) -> dict:
        return {"f": self.f.to_json(), "alpha": format_rational(self.alpha), "failure": self.failure.to_json()}


@dataclass(frozen=True)
class MultiplierReport:
    params: AlgebraParams
    regime: Regime
    necessary: tuple[ConditionResult, ...]
    sufficient: tuple[ConditionResult, ...]
    verdict: Verdict
    witness: Witness | None = None
    norm_upper_bound: float | None = None
    norm_lower_bound: float | None = None

    def condition(self, name: str) -> ConditionResult:
        for c in self.necessary + self.sufficient:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_json(self) -> dict:
        seen, conditions = set(), []
        for kind, group in (("necessary", self.necessary), ("sufficient", self.sufficient)):
            for c in group:
                if c.name in seen:
                    continue
                seen.add(c.name)
                both = c in self.necessary and c in self.sufficient
                conditions.append({**c.to_json(), "kind": "necessary-and-sufficient" if both else kind})
        out = {
            "params": self.params.to_json(),
            "regime": self.regime.value,
            "verdict": self.verdict.value,
            "conditions": conditions,
        }
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        bounds = {}
        if self.norm_upper_bound is not None:
            bounds["upper"] = _json_number(self.norm_upper_bound)
        if self.norm_lower_bound is not None:
            bounds["lower"] = _json_number(self.norm_lower_bound)
        if bounds:
            out["bounds"] = bounds
        return out


# -- regularity --------------------------------------------------------------


def _same_value(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=1e-12, abs_tol=1e-14)


def jump_points(phi: PiecewiseFn) -> list[tuple[Fraction, object, object]]:
    """Interior breakpoints where left limit and right value differ."""
    phi = normalize(phi)
    out = []
    for left, right in zip(phi.pieces, phi.pieces[1:]):
        b = right.lo
        lv, rv = sum_at(left.terms, b), sum_at(right.terms, b)
        if not _same_value(lv, rv):
            out.append((b, lv, rv))
    return out


def check_continuous(phi: PiecewiseFn, name: str = "continuous") -> ConditionResult:
    jumps = jump_points(phi)
    if jumps:
        b, lv, rv = jumps[0]
        return ConditionResult(
            name,
            Status.FAILS,
            f"jump at x = {_txt(b)}: left limit {float(lv):.12g}, right value {float(rv):.12g}",
            {"jump_at": format_rational(b), "left": _json_number(lv), "right": _json_number(rv)},
        )
    return ConditionResult(name, Status.HOLDS, "no jumps at interior breakpoints")


def check_absolutely_continuous(phi: PiecewiseFn, name: str = "abs-continuous") -> ConditionResult:
    """Continuity at every breakpoint, a finite limit at 0+, and phi' locally integrable."""
    phi = normalize(phi)
    cont = check_continuous(phi, name)
    if cont.fails:
        return cont
    lb = leading_behavior(phi, Endpoint.ZERO)
    if lb is not None and (lb.exponent < 0 or (lb.exponent == 0 and lb.log_power > 0)):
        return ConditionResult(
            name,
            Status.FAILS,
            f"unbounded at 0+: leading exponent {_txt(lb.exponent)}, log power {lb.log_power}",
            {"leading_at_zero": _behavior_json(lb)},
        )
    slope = leading_behavior(differentiate(phi), Endpoint.ZERO)
    if slope is not None and slope.exponent <= -1:
        return ConditionResult(
            name,
            Status.FAILS,
            f"phi' not integrable at 0+: exponent {_txt(slope.exponent)}",
            {"derivative_at_zero": _behavior_json(slope)},
        )
    return ConditionResult(
        name,
        Status.HOLDS,
        "continuous with a finite limit at 0+ and phi' integrable on every [0, K]",
        {"leading_at_zero": _behavior_json(lb)},
    )


# -- growth ------------------------------------------------------------------


def tv_growth_exponent(phi: PiecewiseFn) -> LeadingBehavior | None:
    """Leading behaviour at infinity of ``V(x) = integral of |phi'| over (0, x)``.

    None means V vanishes identically.
    """
    if not check_absolutely_continuous(phi).holds:
        raise ValueError("total variation growth needs an absolutely continuous phi")
    slope = differentiate(phi)
    if slope.is_zero:
        return None
    lb = leading_behavior(slope, Endpoint.INFINITY)
    if lb is not None and lb.exponent > -1:
        e = lb.exponent + 1
        return LeadingBehavior(Endpoint.INFINITY, e, lb.log_power, abs(lb.coeff) / float(e))
    if lb is not None and lb.exponent == -1:
        k = lb.log_power + 1
        return LeadingBehavior(Endpoint.INFINITY, Fraction(0), k, abs(lb.coeff) / k)
    total = lp_norm(slope, 1)
    return LeadingBehavior(Endpoint.INFINITY, Fraction(0), 0, total.value)


def lp_growth_exponent(phi: PiecewiseFn, p) -> LeadingBehavior | None:
    """Leading behaviour at infinity of ``x -> ||phi restricted to [0, x]||_p``.

    Requires phi locally in L_p; None means phi vanishes identically.
    """
    p = to_exponent(p)
    phi = normalize(phi)
    if phi.is_zero:
        return None
    lb = leading_behavior(phi, Endpoint.INFINITY)
    if p == INF:
        if lb is not None and (lb.exponent > 0 or (lb.exponent == 0 and lb.log_power > 0)):
            return LeadingBehavior(Endpoint.INFINITY, lb.exponent, lb.log_power, abs(lb.coeff))
        return LeadingBehavior(Endpoint.INFINITY, Fraction(0), 0, sup_norm(phi).value)
    if lb is not None and lb.exponent * p > -1:
        m = lb.exponent * p + 1
        return LeadingBehavior(Endpoint.INFINITY, m / p, lb.log_power, abs(lb.coeff) / float(m) ** (1 / float(p)))
    if lb is not None and lb.exponent * p == -1:
        m = lb.log_power * p + 1
        return LeadingBehavior(Endpoint.INFINITY, Fraction(0), m / p, abs(lb.coeff) / float(m) ** (1 / float(p)))
    return LeadingBehavior(Endpoint.INFINITY, Fraction(0), 0, lp_norm(phi, p).value)


def _big_o(lb: LeadingBehavior | None, bound: Fraction) -> bool:
    """``O(x**bound)``: exponent below, or equal with no log factor."""
    return lb is None or lb.exponent < bound or (lb.exponent == bound and lb.log_power == 0)


def _little_o_every_eps(lb: LeadingBehavior | None, bound: Fraction) -> bool:
    """``o(x**(bound + eps))`` for every eps > 0: exponent at most ``bound``."""
    return lb is None or lb.exponent <= bound


def _growth_text(lb: LeadingBehavior | None) -> str:
    if lb is None:
        return "identically zero"
    text = f"x^{_txt(lb.exponent)}"
    if lb.log_power:
        text += f" ln(x)^{_txt(Fraction(lb.log_power))}"
    return text


# -- the derivative surrogate -----------------------------------------------


def check_mphi_prime_surrogate(phi: PiecewiseFn, params: AlgebraParams, a, q, name: str = "mphi-prime-surrogate") -> ConditionResult:
    """``phi'`` in L_1 on [0, a] and in L_q on (a, inf), with 1 <= q <= r'.

    This bounds the operator ``F -> phi' F`` from transforms of A_r into L_1 by
    ``||phi' on [0, a]||_1 + ||phi' on (a, inf)||_q``.
    """
    a, q = to_rational(a), to_exponent(q)
    if a <= 0:
        raise ValueError("surrogate split point must be positive")
    if q > params.r_conj:
        raise ValueError(f"surrogate exponent q = {_txt(q)} exceeds r' = {_txt(params.r_conj)}")
    slope = differentiate(phi)
    head = lp_norm(restrict(slope, 0, a), 1)
    tail = lp_norm(restrict(slope, a, INF), q)
    data = {
        "a": format_rational(a),
        "q": format_exponent(q),
        "head_l1": head.to_json(),
        "tail_lq": tail.to_json(),
    }
    for part, norm in (("[0, a]", head), ("(a, inf)", tail)):
        if not norm.finite:
            cert = norm.divergence
            return ConditionResult(
                name,
                Status.FAILS,
                f"phi' on {part} diverges: exponent {_txt(cert.exponent)} at {cert.endpoint.value}",
                data,
            )
    bound = head.value + tail.value
    data["bound"] = bound
    return ConditionResult(
        name,
        Status.HOLDS,
        f"phi' in L_1[0, {_txt(a)}] and L_{_txt(q)}({_txt(a)}, inf); bound {bound:.12g}",
        data,
    )


def surrogate_candidates(phi: PiecewiseFn, params: AlgebraParams) -> list[tuple[Fraction, object]]:
    """Split points over phi's breakpoints (or 1) and q over r', a midpoint, 1."""
    splits = [b for b in normalize(phi).breakpoints if b > 0] or [Fraction(1)]
    rc = params.r_conj
    mid = Fraction(2) if rc == INF else (1 + rc) / 2
    qs = []
    for q in (rc, mid, Fraction(1)):
        if q not in qs:
            qs.append(q)
    return [(a, q) for a in splits for q in qs]


def search_mphi_prime_surrogate(phi: PiecewiseFn, params: AlgebraParams, name: str = "mphi-prime-surrogate") -> ConditionResult:
    """First Holds among the surrogate candidates, else the last failure."""
    last = None
    for a, q in surrogate_candidates(phi, params):
        last = check_mphi_prime_surrogate(phi, params, a, q, name)
        if last.holds:
            return last
    return last


def _as_unknown(result: ConditionResult) -> ConditionResult:
    """The surrogate is sufficient only, so its failure decides nothing."""
    if not result.fails:
        return result
    return ConditionResult(
        result.name,
        Status.UNKNOWN,
        "surrogate inconclusive (" + result.evidence + "); M_phi' boundedness not decided",
        result.data,
    )


# -- theorem-level checks ----------------------------------------------------


def _check_bounded(phi: PiecewiseFn, name: str) -> tuple[ConditionResult, NormValue]:
    sup = sup_norm(phi)
    if not sup.finite:
        cert = sup.divergence
        return (
            ConditionResult(
                name,
                Status.FAILS,
                f"unbounded at {cert.endpoint.value}: exponent {_txt(cert.exponent)}",
                {"divergence": cert.to_json()},
            ),
            sup,
        )
    return ConditionResult(name, Status.HOLDS, f"sup |phi| = {sup.value:.12g}", {"sup": sup.to_json()}), sup


def _require(params: AlgebraParams, regime: Regime):
    if params.regime is not regime:
        raise ValueError(f"check applies to regime {regime.value}, got {params.regime.value}")


def check_necessary_r_gt_p(phi: PiecewiseFn, params: AlgebraParams) -> list[ConditionResult]:
    """Boundedness, absolute continuity with ``O(x**(1/r))`` variation, surrogate."""
    _require(params, Regime.R_GT_P)
    bounded, _ = _check_bounded(phi, "thm3.i.phi-bounded")
    ac = check_absolutely_continuous(phi, "thm3.ii.abs-continuous")
    results = [bounded, ac]
    bound = reciprocal(params.r)
    if ac.holds:
        lb = tv_growth_exponent(phi)
        ok = _big_o(lb, bound)
        results.append(
            ConditionResult(
                "thm3.ii.tv-growth",
                Status.HOLDS if ok else Status.FAILS,
                f"integral of |phi'| over [0, x] grows like {_growth_text(lb)}; "
                f"O(x^{_txt(bound)}) {'holds' if ok else 'fails'}",
                {"growth": _behavior_json(lb), "bound_exponent": format_rational(bound)},
            )
        )
    else:
        results.append(ConditionResult("thm3.ii.tv-growth", Status.UNKNOWN, "phi is not absolutely continuous"))
    results.append(_as_unknown(search_mphi_prime_surrogate(phi, params, "thm3.iii.mphi-prime-surrogate")))
    return results


def check_sufficient_r_gt_p(phi: PiecewiseFn, params: AlgebraParams) -> tuple[list[ConditionResult], float | None]:
    """phi in L_v, absolute continuity, surrogate; returns the results and the norm bound."""
    _require(params, Regime.R_GT_P)
    v = params.v
    lv = lp_norm(phi, v)
    if lv.finite:
        in_lv = ConditionResult("thm4.i.phi-in-Lv", Status.HOLDS, f"||phi||_{_txt(v)} = {lv.value:.12g}", {"v": format_exponent(v), "norm": lv.to_json()})
    else:
        cert = lv.divergence
        in_lv = ConditionResult(
            "thm4.i.phi-in-Lv",
            Status.FAILS,
            f"phi not in L_{_txt(v)}: exponent {_txt(cert.exponent)} at {cert.endpoint.value}",
            {"v": format_exponent(v), "norm": lv.to_json()},
        )
    ac = check_absolutely_continuous(phi, "thm4.ii.abs-continuous")
    sur = _as_unknown(search_mphi_prime_surrogate(phi, params, "thm4.iii.mphi-prime-surrogate"))
    results = [in_lv, ac, sur]
    bound = None
    if all(c.holds for c in results):
        sup = sup_norm(phi)
        if sup.finite:
            bound = sur.data["bound"] + sup.value + lv.value
    return results, bound


def check_sufficient_r_lt_p(phi: PiecewiseFn, params: AlgebraParams) -> tuple[list[ConditionResult], float | None]:
    """Bounded or in L_p, absolute continuity, surrogate."""
    _require(params, Regime.R_LT_P)
    return _bounded_ac_surrogate(phi, params, "thm6", allow_lp=True)


def _bounded_ac_surrogate(phi, params, prefix, allow_lp):
    bounded, sup = _check_bounded(phi, f"{prefix}.i.phi-bounded" + ("-or-in-Lp" if allow_lp else ""))
    if allow_lp and bounded.fails:
        lp = lp_norm(phi, params.p)
        if lp.finite:
            bounded = ConditionResult(
                bounded.name, Status.HOLDS, f"phi unbounded but ||phi||_{_txt(params.p)} = {lp.value:.12g}", {"lp": lp.to_json()}
            )
        else:
            bounded = ConditionResult(
                bounded.name,
                Status.FAILS,
                f"{bounded.evidence}; and phi not in L_{_txt(params.p)} "
                f"(exponent {_txt(lp.divergence.exponent)} at {lp.divergence.endpoint.value})",
                {**bounded.data, "lp": lp.to_json()},
            )
    ac = check_absolutely_continuous(phi, f"{prefix}.ii.abs-continuous")
    sur = _as_unknown(search_mphi_prime_surrogate(phi, params, f"{prefix}.iii.mphi-prime-surrogate"))
    results = [bounded, ac, sur]
    bound = None
    if all(c.holds for c in results) and sup.finite:
        bound = 2 * sup.value + sur.data["bound"]
    return results, bound


def check_equal_exponent(phi: PiecewiseFn, params: AlgebraParams) -> tuple[list[ConditionResult], float | None]:
    """Bounded, absolutely continuous, surrogate; these characterize r = p."""
    _require(params, Regime.R_EQ_P)
    return _bounded_ac_surrogate(phi, params, "thm1", allow_lp=False)


def check_necessary_r_lt_p(phi: PiecewiseFn, params: AlgebraParams) -> list[ConditionResult]:
    """Continuity, absolute continuity, local L_p, and little-o growth of both
    ``||phi on [0, x]||_p`` and ``||phi' on [0, x]||_1`` against ``x**(1/r + eps)``.

    Growth at exponent exactly 1/r passes even with log factors, since
    ``ln(x)**k`` is ``o(x**eps)`` for every eps > 0.
    """
    _require(params, Regime.R_LT_P)
    phi = normalize(phi)
    p = params.p
    cont = check_continuous(phi, "thm7.continuous")
    ac = check_absolutely_continuous(phi, "thm7.abs-continuous")

    local_name = "thm7.locally-Lp"
    lb0 = leading_behavior(phi, Endpoint.ZERO)
    if p == INF:
        bad = lb0 is not None and (lb0.exponent < 0 or (lb0.exponent == 0 and lb0.log_power > 0))
        worst = None if lb0 is None else lb0.exponent
    else:
        bad = lb0 is not None and lb0.exponent * p <= -1
        worst = None if lb0 is None else lb0.exponent * p
    if bad:
        local = ConditionResult(
            local_name,
            Status.FAILS,
            f"not in L_{_txt(p)} near 0+: exponent {_txt(worst)}",
            {"exponent_at_zero": format_rational(worst)},
        )
    else:
        local = ConditionResult(local_name, Status.HOLDS, f"phi in L_{_txt(p)}[0, K] for every K")

    bound = reciprocal(params.r)
    growth_name = "thm7.growth"
    if not (local.holds and ac.holds):
        growth = ConditionResult(growth_name, Status.UNKNOWN, "growth undefined without local L_p and absolute continuity")
    else:
        lp_lb = lp_growth_exponent(phi, p)
        tv_lb = tv_growth_exponent(phi)
        lp_ok, tv_ok = _little_o_every_eps(lp_lb, bound), _little_o_every_eps(tv_lb, bound)
        parts = [
            f"||phi on [0, x]||_{_txt(p)} grows like {_growth_text(lp_lb)} ({'ok' if lp_ok else 'too fast'})",
            f"||phi' on [0, x]||_1 grows like {_growth_text(tv_lb)} ({'ok' if tv_ok else 'too fast'})",
            f"little-o bound x^({_txt(bound)} + eps) for every eps > 0",
        ]
        at_edge = [lb for lb in (lp_lb, tv_lb) if lb is not None and lb.exponent == bound and lb.log_power]
        if at_edge:
            parts.append("log factor at the critical exponent admitted")
        growth = ConditionResult(
            growth_name,
            Status.HOLDS if lp_ok and tv_ok else Status.FAILS,
            "; ".join(parts),
            {"lp_growth": _behavior_json(lp_lb), "tv_growth": _behavior_json(tv_lb), "bound_exponent": format_rational(bound)},
        )
    return [cont, ac, local, growth]


# -- witnesses ---------------------------------------------------------------


def _witness_for(phi: PiecewiseFn, params: AlgebraParams, alpha: Fraction) -> Witness | None:
    if alpha <= reciprocal(params.r):
        return None
    product = normalize(phi * families.power_tail_transform(alpha))
    cert = lp_divergence(product, params.p)
    if cert is None:
        return None
    return Witness(families.power_tail_witness(alpha), alpha, cert)


def witness_alphas(phi: PiecewiseFn, params: AlgebraParams) -> list[Fraction]:
    """Candidate tail exponents, most informative first."""
    low = reciprocal(params.r)
    out = []
    if params.regime is Regime.R_GT_P:
        out.append((low + reciprocal(params.p)) / 2)
    lb = leading_behavior(phi, Endpoint.INFINITY)
    if lb is not None:
        if params.p != INF:
            out.append(lb.exponent + reciprocal(params.p))
        elif lb.log_power > 0:
            out.append(lb.exponent)
    out += [low + Fraction(1, k) for k in range(2, 65)]
    seen, unique = set(), []
    for a in out:
        if a not in seen:
            seen.add(a)
            unique.append(a)
    return unique


def witness_search(phi: PiecewiseFn, params: AlgebraParams) -> Witness | None:
    """First ``f`` with transform ``x`` on (0, 1), ``x**-alpha`` beyond, that
    lies in A_r (alpha > 1/r) while ``phi * F`` leaves L_p."""
    for alpha in witness_alphas(phi, params):
        w = _witness_for(phi, params, alpha)
        if w is not None:
            return w
    return None


def verify_witness(phi: PiecewiseFn, params: AlgebraParams, w: Witness) -> bool:
    """Re-check a witness through the algebra layer's norms."""
    if not ap_norm(w.f, params.r).finite:
        return False
    return not lp_norm(normalize(phi * gelfand_transform(w.f)), params.p).finite


# -- norm bounds -------------------------------------------------------------


def default_witness_pool(params: AlgebraParams, size: int = 20) -> list[PiecewiseFn]:
    """Half power-tail members (alpha above 1/r), half tents at several scales."""
    low = reciprocal(params.r)
    tails = [families.power_tail_witness(low + Fraction(k, 4)) for k in range(1, size // 2 + 1)]
    tents = []
    for j in range(size - len(tails)):
        s = Fraction(2) ** (j - 3)
        tents.append(families.tent(s, 2 * s, 3 * s + s / 2))
    return tails + tents


def multiplied_element(phi: PiecewiseFn, f: PiecewiseFn) -> PiecewiseFn:
    """The A_p element with transform ``phi * F``: ``phi' F + phi f``."""
    big_f = gelfand_transform(f)
    return normalize(differentiate(phi) * big_f + phi * f)


def _ratio(phi: PiecewiseFn, params: AlgebraParams, f: PiecewiseFn) -> float:
    den = ap_norm(f, params.r)
    if not den.finite:
        raise ValueError("witness is not in A_r")
    if den.value == 0:
        return 0.0
    g = multiplied_element(phi, f)
    l1 = lp_norm(g, 1)
    top = lp_norm(normalize(phi * gelfand_transform(f)), params.p)
    if not (l1.finite and top.finite):
        return math.inf
    return (l1.value + top.value) / den.value


def operator_norm_lower_bound(phi: PiecewiseFn, params: AlgebraParams, witnesses: Sequence[PiecewiseFn], threads: int = 1) -> float:
    """Max over witnesses of ``|||phi F|||_p / |||f|||_r``."""
    if not witnesses:
        return 0.0
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            # each task runs in a copy of the caller's context so the tolerance carries over
            tasks = [pool.submit(contextvars.copy_context().run, _ratio, phi, params, f) for f in witnesses]
            ratios = [t.result() for t in tasks]
    else:
        ratios = [_ratio(phi, params, f) for f in witnesses]
    return max(ratios)


_SPIKE_WIDTHS = tuple([Fraction(1, 2**j) for j in range(31)] + [Fraction(2**j) for j in range(1, 9)])


@lru_cache(maxsize=None)
def _spike_value(w: Fraction, p) -> float:
    f = families.spike(w, w)
    return 1.0 / ap_norm(f, p).value


@lru_cache(maxsize=None)
def _box_value(w: Fraction) -> float:
    return float(w) / ap_norm(families.box(w), INF).value


def point_eval_constant(x, p) -> float:
    """Empirical lower estimate of ``sup |F(x)|`` over the unit ball of A_p.

    The pool holds unit-normalized spikes whose transforms peak at ``x`` (and,
    for p = inf, boxes starting at 0); only widths ``w <= x`` enter, so the
    estimate is nondecreasing in ``x``.  Spike norms are translation
    invariant and computed once per width.
    """
    p = to_exponent(p)
    xq = to_rational(x) if not isinstance(x, float) else Fraction(x)
    if xq <= 0:
        raise ValueError("x must be positive")
    best = 0.0
    for w in _SPIKE_WIDTHS:
        if w <= xq:
            best = max(best, _spike_value(w, p))
            if p == INF:
                best = max(best, _box_value(w))
    return best


# -- classification ----------------------------------------------------------


def classify(phi: PiecewiseFn, params: AlgebraParams, lower_bound: bool = True, threads: int = 1) -> MultiplierReport:
    """Dispatch on the regime and combine conditions, witness and bounds."""
    phi = normalize(phi)
    regime = params.regime
    upper = None
    if regime is Regime.R_EQ_P:
        results, upper = check_equal_exponent(phi, params)
        necessary = sufficient = tuple(results)
        decided_not = any(c.fails for c in results[:2])
    elif regime is Regime.R_GT_P:
        necessary = tuple(check_necessary_r_gt_p(phi, params))
        results, upper = check_sufficient_r_gt_p(phi, params)
        sufficient = tuple(results)
        decided_not = any(c.fails for c in necessary)
    else:
        necessary = tuple(check_necessary_r_lt_p(phi, params))
        results, upper = check_sufficient_r_lt_p(phi, params)
        sufficient = tuple(results)
        decided_not = any(c.fails for c in necessary)

    witness = witness_search(phi, params)
    is_multiplier = all(c.holds for c in sufficient)
    if is_multiplier and (witness is not None or decided_not):
        raise InconsistentVerdictError(
            f"sufficient conditions hold for r={_txt(params.r)}, p={_txt(params.p)} "
            "but a necessary condition fails or a witness exists"
        )
    if is_multiplier:
        verdict = Verdict.MULTIPLIER
    elif decided_not or witness is not None:
        verdict = Verdict.NOT_MULTIPLIER
    else:
        verdict = Verdict.UNDETERMINED

    lower = None
    if verdict is Verdict.MULTIPLIER and lower_bound:
        lower = operator_norm_lower_bound(phi, params, default_witness_pool(params), threads)
    return MultiplierReport(
        params,
        regime,
        necessary,
        sufficient,
        verdict,
        witness,
        upper if verdict is Verdict.MULTIPLIER else None,
        lower,
    )
