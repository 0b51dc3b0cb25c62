"""Independent quadrature and sampling used to cross-check the exact layer.

Nothing here decides divergence: every entry point first asks the exact
exponent analysis whether the integral converges and refuses otherwise.

Each piece is cut at the sign changes of its term sum and mapped so the
integrand stays bounded:

* a segment touching 0 uses ``x = X * u**m`` with ``m`` chosen from the
  leading exponent at 0+;
* a segment reaching infinity uses ``x = X * u**-m`` and is truncated at a
  cutoff ``T`` whose omitted mass is bounded in closed form (an upper
  incomplete gamma function) from the leading behaviour at infinity;
* finite segments are integrated on a linear or log-uniform map.

Panels use the 15-point Gauss-Kronrod rule, the worst panel is bisected until
the summed ``|K15 - G7|`` estimate meets ``rel_tol`` or ``MAX_PANELS`` is hit.
"""

from __future__ import annotations

import contextvars
import math
import random
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from scipy.special import gammaincc, gammaln

from .kernels import adaptive_integrate
from .symfunc import (
    INF,
    Divergence,
    Endpoint,
    PiecewiseFn,
    Term,
    lp_divergence,
    normalize,
    restrict,
    sign_changes,
    to_bound,
    to_rational,
)

DEFAULT_REL_TOL = 1e-10
MAX_PANELS = 2**14

_rel_tol = contextvars.ContextVar("ordalg_rel_tol", default=DEFAULT_REL_TOL)


def current_rel_tol(rel_tol: float | None = None) -> float:
    """``rel_tol`` if given, else the tolerance set by ``tolerance``."""
    return _rel_tol.get() if rel_tol is None else rel_tol


@contextmanager
def tolerance(rel_tol: float):
    """Set the default quadrature tolerance for the enclosed block."""
    if not rel_tol > 0:
        raise ValueError("tolerance must be positive")
    token = _rel_tol.set(rel_tol)
    try:
        yield
    finally:
        _rel_tol.reset(token)


class ConvergenceNotCertifiedError(ValueError):
    """Quadrature was asked for an integral the exact layer does not certify."""

    def __init__(self, certificate: Divergence):
        self.certificate = certificate
        super().__init__(
            f"integral not certified convergent: exponent {certificate.exponent} at {certificate.endpoint.value}"
        )


@dataclass(frozen=True)
class Truncation:
    used_cutoff: float
    tail_bound: float


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    subdivisions: int
    truncation: Truncation | None = None

    def to_json(self) -> dict:
        out = {"value": self.value, "abs_error_estimate": self.abs_error_estimate, "subdivisions": self.subdivisions}
        if self.truncation is not None:
            out["truncation"] = {"used_cutoff": self.truncation.used_cutoff, "tail_bound": self.truncation.tail_bound}
        return out


@dataclass(frozen=True)
class SampleReport:
    max_deviation: float
    worst_x: float
    samples: int
    rel_tol: float

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.rel_tol


# -- segment integration -----------------------------------------------------


def _arrays(terms: Sequence[Term], shift: float):
    return (
        [float(t.coeff) for t in terms],
        [float(t.exp) - shift for t in terms],
        [t.logpow for t in terms],
    )


def _log_tail_bound(terms: Sequence[Term], log_cutoff: float, p: float) -> float:
    """log of an upper bound on the integral of |f|**p over (T, inf).

    For x >= max(e, 1): |f| <= C x**a ln(x)**K with C = sum |c_i|, a the top
    exponent and K the top log power, and
    integral_T^inf x**(a p) ln(x)**(K p) dx = Gamma(K p + 1, d ln T) / d**(K p + 1)
    with d = -(a p + 1) > 0.
    """
    c = math.fsum(abs(float(t.coeff)) for t in terms)
    a = max(float(t.exp) for t in terms)
    k = max(t.logpow for t in terms)
    d = -(a * p + 1.0)
    s = k * p + 1.0
    q = gammaincc(s, d * log_cutoff)
    if q <= 0.0:
        return -math.inf
    return p * math.log(c) + gammaln(s) + math.log(q) - s * math.log(d)


def _integrate_to_infinity(terms, start: float, p: float, absolute: bool, rel_tol: float):
    lead_exp = max(float(t.exp) for t in terms)
    delta = -(lead_exp * p + 1.0)
    m = max(2.0, math.ceil(2.0 / delta))
    c, e, k = _arrays(terms, lead_exp)
    base = math.log(start)
    args = (c, e, k, lead_exp * p + 1.0, p, absolute, 2, base, m, 0.0)

    rough, _, _ = adaptive_integrate(*args, 0.0, 1.0, rel_tol, 0.0, MAX_PANELS)
    target = 0.1 * rel_tol * abs(rough)
    lo_cut = max(base, 1.0) + m * math.log(2.0)
    if target == 0.0:
        return rough, 0.0, 1, None
    hi_cut = lo_cut
    while _log_tail_bound(terms, hi_cut, p) > math.log(target):
        hi_cut *= 2.0
        if hi_cut > 1e8:
            break
    if hi_cut > lo_cut:
        lo_side = hi_cut / 2.0
        for _ in range(60):
            mid = 0.5 * (lo_side + hi_cut)
            if _log_tail_bound(terms, mid, p) > math.log(target):
                lo_side = mid
            else:
                hi_cut = mid
    u_min = math.exp(-(hi_cut - base) / m)
    value, err, panels = adaptive_integrate(*args, u_min, 1.0, rel_tol, 0.0, MAX_PANELS)
    tail = math.exp(_log_tail_bound(terms, hi_cut, p))
    cutoff = math.exp(hi_cut) if hi_cut < 709.0 else INF
    return value, err, panels, Truncation(cutoff, tail)


def _integrate_from_zero(terms, end: float, p: float, absolute: bool, rel_tol: float):
    lead_exp = min(float(t.exp) for t in terms)
    lam = lead_exp * p + 1.0
    m = max(2.0, math.ceil(2.0 / lam))
    c, e, k = _arrays(terms, lead_exp)
    args = (c, e, k, lam, p, absolute, 1, math.log(end), m, 0.0)
    value, err, panels = adaptive_integrate(*args, 0.0, 1.0, rel_tol, 0.0, MAX_PANELS)
    return value, err, panels, None


def _integrate_finite(terms, s: float, t: float, p: float, absolute: bool, rel_tol: float):
    c, e, k = _arrays(terms, 0.0)
    if t / s > 8.0:
        args = (c, e, k, 1.0, p, absolute, 3, math.log(s), math.log(t) - math.log(s), 0.0)
    else:
        args = (c, e, k, 1.0, p, absolute, 0, 0.0, t - s, s)
    value, err, panels = adaptive_integrate(*args, 0.0, 1.0, rel_tol, 0.0, MAX_PANELS)
    return value, err, panels, None


def integrate_piece(terms: Sequence[Term], lo, hi, p=1, absolute: bool = True, rel_tol: float | None = None) -> QuadratureResult:
    """Integrate ``|sum(terms)|**p`` (or the signed sum) over (lo, hi).

    Convergence must already be certified; the piece is cut at sign changes.
    """
    rel_tol = current_rel_tol(rel_tol)
    terms = [t for t in terms if t.coeff != 0]
    if not terms:
        return QuadratureResult(0.0, 0.0, 0)
    p = float(p)
    lo, hi = to_rational(lo), to_bound(hi)
    cuts = [float(lo)] + (sign_changes(terms, lo, hi) if absolute else []) + [float(hi)]
    if hi == INF and cuts[-2] < 1.0:
        cuts.insert(-1, 1.0)
    if lo == 0 and cuts[1] == INF:
        cuts.insert(1, 1.0)

    values, errors, panels, truncation = [], [], 0, None
    for s, t in zip(cuts, cuts[1:]):
        if s == 0.0:
            v, e, n, tr = _integrate_from_zero(terms, t, p, absolute, rel_tol)
        elif t == INF:
            v, e, n, tr = _integrate_to_infinity(terms, s, p, absolute, rel_tol)
        else:
            v, e, n, tr = _integrate_finite(terms, s, t, p, absolute, rel_tol)
        values.append(v)
        errors.append(e)
        panels += n
        truncation = tr or truncation
    return QuadratureResult(math.fsum(values), math.fsum(errors), panels, truncation)


def _merge(results: list[QuadratureResult]) -> QuadratureResult:
    cut = [r.truncation for r in results if r.truncation is not None]
    truncation = Truncation(max(t.used_cutoff for t in cut), math.fsum(t.tail_bound for t in cut)) if cut else None
    return QuadratureResult(
        math.fsum(r.value for r in results),
        math.fsum(r.abs_error_estimate for r in results),
        sum(r.subdivisions for r in results),
        truncation,
    )


# -- public operations -------------------------------------------------------


def quad_integral(f: PiecewiseFn, lo=0, hi=INF, rel_tol: float | None = None) -> QuadratureResult:
    """Signed integral of ``f`` over (lo, hi)."""
    rel_tol = current_rel_tol(rel_tol)
    g = restrict(f, lo, hi)
    cert = lp_divergence(g, 1)
    if cert is not None:
        raise ConvergenceNotCertifiedError(cert)
    return _merge([integrate_piece(pc.terms, pc.lo, pc.hi, 1, False, rel_tol) for pc in g.pieces if pc.terms])


def quad_power_integral(f: PiecewiseFn, p, rel_tol: float | None = None) -> QuadratureResult:
    """Integral of ``|f|**p`` over (0, inf) (no p-th root)."""
    rel_tol = current_rel_tol(rel_tol)
    f = normalize(f)
    cert = lp_divergence(f, to_rational(p))
    if cert is not None:
        raise ConvergenceNotCertifiedError(cert)
    return _merge([integrate_piece(pc.terms, pc.lo, pc.hi, p, True, rel_tol) for pc in f.pieces if pc.terms])


def root_result(res: QuadratureResult, p) -> QuadratureResult:
    """Map a result for the integral of |f|**p to one for the norm."""
    p = float(p)
    total = res.value
    if total <= 0.0:
        return QuadratureResult(0.0, res.abs_error_estimate ** (1.0 / p), res.subdivisions, res.truncation)
    norm = total ** (1.0 / p)
    lower = max(total - res.abs_error_estimate, 0.0)
    err = norm - lower ** (1.0 / p)
    truncation = None
    if res.truncation is not None:
        # concavity of t -> t**(1/p)
        tail = norm / (p * total) * res.truncation.tail_bound
        truncation = Truncation(res.truncation.used_cutoff, tail)
    return QuadratureResult(norm, err, res.subdivisions, truncation)


def quad_lp_norm(f: PiecewiseFn, p, rel_tol: float | None = None) -> QuadratureResult:
    """``||f||_p`` for finite ``p`` by quadrature over the sign-resolved partition."""
    if p == INF:
        raise ValueError("quad_lp_norm handles finite p only")
    return root_result(quad_power_integral(f, p, rel_tol), p)


def sample_points(f: PiecewiseFn, g: PiecewiseFn, n: int, seed: int = 0) -> list[float]:
    """``n`` log-uniform points in (1e-6, 1e6) kept off both functions' breakpoints."""
    rng = random.Random(seed)
    cuts = [float(b) for b in sorted(set(normalize(f).breakpoints) | set(normalize(g).breakpoints))]
    points = []
    while len(points) < n:
        x = math.exp(rng.uniform(math.log(1e-6), math.log(1e6)))
        if all(abs(x - b) > 1e-9 * b for b in cuts):
            points.append(x)
    return points


def _magnitude(f: PiecewiseFn, x: float) -> float:
    return math.fsum(abs(t(x)) for t in f.piece_at(x).terms)


def sample_compare(f: PiecewiseFn, g: PiecewiseFn, n: int = 200, rel_tol: float = DEFAULT_REL_TOL, seed: int = 0) -> SampleReport:
    """Max relative deviation between ``f`` and ``g`` over ``n`` sample points.

    Deviations are measured against the summed term magnitudes, the scale at
    which round-off in either evaluation lives.
    """
    worst, worst_x = 0.0, float("nan")
    for x in sample_points(f, g, n, seed):
        a, b = f(x), g(x)
        scale = max(abs(a), abs(b), _magnitude(f, x), _magnitude(g, x))
        dev = 0.0 if scale == 0.0 else abs(a - b) / scale
        if dev > worst or math.isnan(worst_x):
            worst, worst_x = dev, x
    return SampleReport(worst, worst_x, n, rel_tol)
