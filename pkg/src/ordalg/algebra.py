"""The order-convolution algebra L1((0, inf), max) and its ideals A_p.

``f * g = f * G + g * F`` where capitals are indefinite integrals from 0, and
the Gelfand transform of ``f`` is that indefinite integral.  ``A_p`` holds the
``f`` in L1 whose transform lies in L_p, normed by ``||f||_1 + ||F||_p``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

from . import oracle
from .symfunc import (
    INF,
    Divergence,
    Endpoint,
    PiecewiseFn,
    Piece,
    antiderivative_from_zero,
    differentiate,
    format_rational,
    leading_behavior,
    lp_divergence,
    normalize,
    sign_changes,
    terms_leading_behavior,
    to_rational,
)

Exponent = Union[Fraction, float]  # float only for inf


class NotInL1Error(ValueError):
    def __init__(self, certificate: Divergence):
        self.certificate = certificate
        super().__init__(
            f"function is not in L1: exponent {certificate.exponent} at {certificate.endpoint.value}"
        )


def to_exponent(value) -> Exponent:
    """Rational exponent >= 1, or ``inf``."""
    if isinstance(value, str) and value.strip().lower() in ("inf", "infinity"):
        return INF
    if isinstance(value, float) and value == INF:
        return INF
    q = to_rational(value)
    if q < 1:
        raise ValueError(f"exponent must be >= 1, got {q}")
    return q


def reciprocal(e: Exponent) -> Fraction:
    return Fraction(0) if e == INF else 1 / e


def conjugate(e: Exponent) -> Exponent:
    """``e'`` with ``1/e + 1/e' = 1``."""
    if e == INF:
        return Fraction(1)
    if e == 1:
        return INF
    return e / (e - 1)


def format_exponent(e: Exponent) -> str:
    return "inf" if e == INF else format_rational(e)


class Regime(str, Enum):
    R_GT_P = "r>p"
    R_LT_P = "r<p"
    R_EQ_P = "r=p"


@dataclass(frozen=True)
class AlgebraParams:
    """Exponent pair for (A_r, A_p) multipliers, with the derived exponents."""

    r: Exponent
    p: Exponent

    def __post_init__(self):
        object.__setattr__(self, "r", to_exponent(self.r))
        object.__setattr__(self, "p", to_exponent(self.p))

    @property
    def regime(self) -> Regime:
        if self.r == self.p:
            return Regime.R_EQ_P
        return Regime.R_GT_P if self.r > self.p else Regime.R_LT_P

    @property
    def v(self) -> Exponent:
        """``1/v = 1/p - 1/r``; only defined when r > p."""
        if self.regime is not Regime.R_GT_P:
            raise ValueError("v is defined only for r > p")
        inv = reciprocal(self.p) - reciprocal(self.r)
        return 1 / inv

    @property
    def r_conj(self) -> Exponent:
        return conjugate(self.r)

    def to_json(self) -> dict:
        out = {"r": format_exponent(self.r), "p": format_exponent(self.p), "r_conj": format_exponent(self.r_conj)}
        if self.regime is Regime.R_GT_P:
            out["v"] = format_exponent(self.v)
        return out


class Method(str, Enum):
    EXACT = "exact"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class NormValue:
    """Nonnegative extended-real norm; infinite exactly when certified divergent."""

    value: float
    method: Method = Method.EXACT
    divergence: Divergence | None = None
    error_bound: float = 0.0

    def __post_init__(self):
        if (self.value == INF) != (self.divergence is not None):
            raise ValueError("value is inf iff a divergence certificate is present")
        if self.method is Method.EXACT and self.error_bound != 0.0:
            raise ValueError("exact norms carry no error bound")
        if self.value < 0:
            raise ValueError("norms are nonnegative")

    @classmethod
    def infinite(cls, certificate: Divergence) -> NormValue:
        return cls(INF, Method.EXACT, certificate)

    @property
    def finite(self) -> bool:
        return self.divergence is None

    def __add__(self, other: NormValue) -> NormValue:
        if not self.finite:
            return self
        if not other.finite:
            return other
        method = Method.EXACT if self.method is other.method is Method.EXACT else Method.QUADRATURE
        return NormValue(self.value + other.value, method, None, self.error_bound + other.error_bound)

    def to_json(self) -> dict:
        out = {
            "value": "inf" if self.value == INF else self.value,
            "method": self.method.value,
            "error_bound": self.error_bound,
        }
        if self.divergence is not None:
            out["divergence"] = self.divergence.to_json()
        return out


# -- algebra operations ------------------------------------------------------


def order_convolve(f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    """``f * g = f G + g F`` with ``F, G`` the indefinite integrals from 0."""
    big_f = antiderivative_from_zero(f)
    big_g = antiderivative_from_zero(g)
    return normalize(f * big_g + g * big_f)


def gelfand_transform(f: PiecewiseFn) -> PiecewiseFn:
    cert = lp_divergence(f, 1)
    if cert is not None:
        raise NotInL1Error(cert)
    return antiderivative_from_zero(f)


def transform_at_infinity(f: PiecewiseFn) -> float:
    """The transform's value at the point inf of (0, inf]: the total integral."""
    lb = leading_behavior(gelfand_transform(f), Endpoint.INFINITY)
    if lb is None or lb.exponent < 0:
        return 0.0
    return lb.coeff


# -- norms -------------------------------------------------------------------


def _pure_power_integral(piece: Piece, p: Fraction) -> float | None:
    """Closed form for ``|c x**a|**p`` over a piece; None for other shapes."""
    if len(piece.terms) != 1 or piece.terms[0].logpow != 0:
        return None
    t = piece.terms[0]
    m = t.exp * p + 1
    scale = abs(float(t.coeff)) ** float(p)
    lo, hi = piece.lo, piece.hi
    if m == 0:
        return scale * (math.log(hi) - math.log(lo))
    mf = float(m)
    if lo == 0:
        return scale * math.exp(mf * math.log(hi)) / mf
    if hi == INF:
        return scale * math.exp(mf * math.log(lo)) / -mf
    # t**m - s**m = s**m * expm1(m ln(t/s))
    return scale * math.exp(mf * math.log(lo)) * math.expm1(mf * math.log(hi / lo)) / mf


def _affine_integral(piece: Piece, p: Fraction) -> float | None:
    """Closed form for ``|A + B x|**p`` over a finite piece; None otherwise."""
    if piece.hi == INF or any(t.logpow or t.exp not in (0, 1) for t in piece.terms):
        return None
    coef = {t.exp: t.coeff for t in piece.terms}
    a, b = coef.get(Fraction(0), 0), coef.get(Fraction(1), 0)
    if b == 0:
        return None
    q = float(p) + 1.0
    cuts = [piece.lo, piece.hi]
    root = -a / b
    if piece.lo < root < piece.hi:
        cuts.insert(1, root)
    total = 0.0
    for s, t in zip(cuts, cuts[1:]):
        hs, ht = abs(float(a + b * s)), abs(float(a + b * t))
        total += abs(ht**q - hs**q) / (q * abs(float(b)))
    return total


def sup_norm(f: PiecewiseFn) -> NormValue:
    """Essential sup from endpoint limits and interior critical points."""
    f = normalize(f)
    cert = lp_divergence(f, INF)
    if cert is not None:
        return NormValue.infinite(cert)
    best = 0.0
    numeric = False
    for piece in f.pieces:
        if piece.is_zero:
            continue
        if piece.lo == 0:
            lb = terms_leading_behavior(piece.terms, Endpoint.ZERO)
            best = max(best, abs(lb.coeff) if lb.exponent == 0 else 0.0)
        else:
            best = max(best, abs(piece(float(piece.lo))))
        if piece.hi == INF:
            lb = terms_leading_behavior(piece.terms, Endpoint.INFINITY)
            best = max(best, abs(lb.coeff) if lb.exponent == 0 else 0.0)
        else:
            best = max(best, abs(piece(float(piece.hi))))
        slope = differentiate(PiecewiseFn((Piece(0, INF, piece.terms),))).pieces
        for x in sign_changes(slope[0].terms if slope else (), piece.lo, piece.hi):
            numeric = True
            best = max(best, abs(piece(x)))
    if numeric:
        return NormValue(best, Method.QUADRATURE, None, 1e-12 * best)
    return NormValue(best)


def lp_norm(f: PiecewiseFn, p, rel_tol: float | None = None) -> NormValue:
    """``||f||_p``; divergence is decided exactly before any numerics.

    Single pure-power pieces and affine pieces integrate in closed form; any
    other piece goes to the quadrature oracle.
    """
    p = to_exponent(p)
    if p == INF:
        return sup_norm(f)
    rel_tol = oracle.current_rel_tol(rel_tol)
    f = normalize(f)
    cert = lp_divergence(f, p)
    if cert is not None:
        return NormValue.infinite(cert)

    exact: list[float] = []
    numeric: list[oracle.QuadratureResult] = []
    for piece in f.pieces:
        if piece.is_zero:
            continue
        closed = _pure_power_integral(piece, p)
        if closed is None:
            closed = _affine_integral(piece, p)
        if closed is not None:
            exact.append(closed)
        else:
            numeric.append(oracle.integrate_piece(piece.terms, piece.lo, piece.hi, p, True, rel_tol))
    if not numeric:
        return NormValue(math.fsum(exact) ** (1.0 / float(p)))
    merged = oracle._merge(numeric)
    total = oracle.QuadratureResult(
        math.fsum(exact) + merged.value, merged.abs_error_estimate, merged.subdivisions, merged.truncation
    )
    rooted = oracle.root_result(total, p)
    tail = rooted.truncation.tail_bound if rooted.truncation else 0.0
    return NormValue(rooted.value, Method.QUADRATURE, None, rooted.abs_error_estimate + tail)


def ap_norm(f: PiecewiseFn, p, rel_tol: float | None = None) -> NormValue:
    """``|||f|||_p = ||f||_1 + ||F||_p``."""
    l1 = lp_norm(f, 1, rel_tol)
    if not l1.finite:
        return l1
    return l1 + lp_norm(gelfand_transform(f), p, rel_tol)


def in_ap(f: PiecewiseFn, p) -> bool:
    return ap_norm(f, p).finite
