"""Exact calculus over piecewise power-log functions on (0, inf).

On every piece a function is a finite sum of terms ``c * x**a * ln(x)**k``
with rational ``a`` and integer ``k >= 0``.  Exponents and breakpoints are
always :class:`fractions.Fraction`; coefficients stay exact rationals until an
irrational constant (``2**(1/3)``, ``ln 2``) is forced on them, at which point
they degrade to ``float``.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

from scipy.optimize import brentq

Coeff = Union[Fraction, float]
Bound = Union[Fraction, float]  # float only for +inf

INF = math.inf
_EPS = 2.0**-52


class PartitionError(ValueError):
    """Pieces do not partition (0, inf)."""


class NonIntegrableError(ValueError):
    """A function is not integrable at 0+."""

    def __init__(self, exponent: Fraction, log_power: int = 0):
        self.exponent = exponent
        self.log_power = log_power
        super().__init__(
            f"not integrable at 0+: leading exponent {exponent} (log power {log_power}) <= -1"
        )


class Endpoint(str, Enum):
    ZERO = "0+"
    INFINITY = "inf"


# -- scalars -----------------------------------------------------------------


def to_rational(value) -> Fraction:
    """Exact rational from an int, Fraction, or string ("2/3", "0.25", "-1e-3").

    Floats are read through their shortest decimal repr, so ``0.1`` becomes 1/10.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a rational")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"not a finite rational: {value}")
        return Fraction(repr(value))
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot read {value!r} as a rational")


def to_bound(value) -> Bound:
    if isinstance(value, str) and value.strip().lower() in ("inf", "+inf", "infinity"):
        return INF
    if isinstance(value, float) and value == INF:
        return INF
    return to_rational(value)


def _coeff(value) -> Coeff:
    if isinstance(value, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (Fraction, float)):
        return value
    return to_rational(value)


def format_rational(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def _iroot(n: int, d: int) -> int | None:
    """Exact integer d-th root of n >= 0, or None."""
    if n < 2:
        return n
    x = 1 << -(-n.bit_length() // d)
    while True:
        y = ((d - 1) * x + n // x ** (d - 1)) // d
        if y >= x:
            break
        x = y
    return x if x**d == n else None


def exact_pow(base: Fraction, exponent: Fraction) -> Fraction | None:
    """``base**exponent`` as a Fraction when it is rational, else None."""
    if base == 0:
        return Fraction(0) if exponent > 0 else None
    if exponent.denominator == 1:
        return base ** exponent.numerator
    if base < 0:
        return None
    d = exponent.denominator
    num = _iroot(base.numerator, d)
    den = _iroot(base.denominator, d)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** exponent.numerator


def _cancel(total: Coeff, *parts: Coeff) -> Coeff:
    """Snap float round-off residue of a cancelling sum to exact zero."""
    if isinstance(total, float):
        scale = sum(abs(float(p)) for p in parts)
        if abs(total) <= 8 * _EPS * scale:
            return Fraction(0)
    return total


# -- terms and pieces --------------------------------------------------------


@dataclass(frozen=True)
class Term:
    """``coeff * x**exp * ln(x)**logpow``."""

    coeff: Coeff
    exp: Fraction
    logpow: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coeff", _coeff(self.coeff))
        object.__setattr__(self, "exp", to_rational(self.exp))
        if not isinstance(self.logpow, int) or self.logpow < 0:
            raise ValueError(f"log power must be a nonnegative int, got {self.logpow!r}")

    @property
    def key(self) -> tuple[Fraction, int]:
        return (self.exp, self.logpow)

    def __call__(self, x: float) -> float:
        x = float(x)
        v = float(self.coeff) * x ** float(self.exp)
        if self.logpow:
            v *= math.log(x) ** self.logpow
        return v

    def exact_at(self, x: Fraction) -> Coeff:
        """Value at a positive rational point, exact when the result is rational."""
        if x == 1:
            return self.coeff if self.logpow == 0 else Fraction(0)
        if self.logpow == 0:
            power = exact_pow(x, self.exp)
            if power is not None:
                return self.coeff * power
        return self(float(x))

    def scaled(self, c: Coeff) -> Term:
        return Term(self.coeff * c, self.exp, self.logpow)

    def __mul__(self, other: Term) -> Term:
        return Term(self.coeff * other.coeff, self.exp + other.exp, self.logpow + other.logpow)


@dataclass(frozen=True)
class Piece:
    """The function on (lo, hi) is the sum of ``terms``; no terms means zero."""

    lo: Fraction
    hi: Bound
    terms: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "lo", to_rational(self.lo))
        object.__setattr__(self, "hi", to_bound(self.hi))
        object.__setattr__(self, "terms", tuple(self.terms))
        if self.lo < 0:
            raise PartitionError(f"piece starts below 0: {self.lo}")
        if not self.lo < self.hi:
            raise PartitionError(f"empty piece ({self.lo}, {self.hi})")

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __call__(self, x: float) -> float:
        return math.fsum(t(x) for t in self.terms)


@dataclass(frozen=True)
class LeadingBehavior:
    """Dominating term ``coeff * x**exponent * ln(x)**log_power`` at an endpoint."""

    endpoint: Endpoint
    exponent: Fraction
    log_power: Union[int, Fraction]
    coeff: float

    def __call__(self, x: float) -> float:
        v = self.coeff * float(x) ** float(self.exponent)
        if self.log_power:
            v *= math.log(x) ** float(self.log_power)
        return v


@dataclass(frozen=True)
class Divergence:
    """Certificate that ``|f|**p`` is not integrable near an endpoint.

    ``exponent`` and ``log_power`` describe the integrand ``|f|**p`` (for
    ``p = inf``, ``f`` itself).
    """

    endpoint: Endpoint
    exponent: Fraction
    log_power: Fraction = Fraction(0)

    def to_json(self) -> dict:
        return {
            "endpoint": self.endpoint.value,
            "exponent": format_rational(self.exponent),
            "log_power": format_rational(Fraction(self.log_power)),
        }


def combine_terms(terms: Iterable[Term]) -> tuple[Term, ...]:
    """Collect like terms, drop zeros, sort by (exp, logpow)."""
    groups: dict[tuple[Fraction, int], list[Coeff]] = {}
    for t in terms:
        groups.setdefault(t.key, []).append(t.coeff)
    out = []
    for (a, k), coeffs in sorted(groups.items()):
        total: Coeff = coeffs[0]
        for c in coeffs[1:]:
            total = total + c
        total = _cancel(total, *coeffs)
        if total != 0:
            out.append(Term(total, a, k))
    return tuple(out)


def _leading_term(terms: Sequence[Term], endpoint: Endpoint) -> Term | None:
    if not terms:
        return None
    if endpoint is Endpoint.ZERO:
        return min(terms, key=lambda t: (t.exp, -t.logpow))
    return max(terms, key=lambda t: (t.exp, t.logpow))


# -- the function type -------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseFn:
    pieces: tuple[Piece, ...]

    def __post_init__(self):
        object.__setattr__(self, "pieces", tuple(self.pieces))

    @classmethod
    def build(cls, spec: Iterable[tuple]) -> PiecewiseFn:
        """From ``[(lo, hi, [(coeff, exp[, logpow]), ...]), ...]``; normalized."""
        pieces = []
        for lo, hi, terms in spec:
            pieces.append(Piece(lo, hi, tuple(Term(*t) for t in terms)))
        return normalize(cls(tuple(pieces)))

    @classmethod
    def zero(cls) -> PiecewiseFn:
        return cls((Piece(Fraction(0), INF, ()),))

    @classmethod
    def constant(cls, c) -> PiecewiseFn:
        return normalize(cls((Piece(Fraction(0), INF, (Term(c, 0),)),)))

    @property
    def breakpoints(self) -> list[Fraction]:
        """Interior breakpoints (finite, positive)."""
        return [p.lo for p in self.pieces[1:]]

    @property
    def is_zero(self) -> bool:
        return all(p.is_zero for p in self.pieces)

    @property
    def has_float_coeffs(self) -> bool:
        return any(isinstance(t.coeff, float) for p in self.pieces for t in p.terms)

    def piece_at(self, x) -> Piece:
        los = [p.lo for p in self.pieces]
        return self.pieces[bisect.bisect_right(los, x) - 1]

    def __call__(self, x) -> float:
        return evaluate(self, x)

    def __add__(self, other) -> PiecewiseFn:
        if not isinstance(other, PiecewiseFn):
            other = PiecewiseFn.constant(other)
        return pointwise("add", self, other)

    __radd__ = __add__

    def __neg__(self) -> PiecewiseFn:
        return self.scale(-1)

    def __sub__(self, other) -> PiecewiseFn:
        return self + (-other)

    def __mul__(self, other) -> PiecewiseFn:
        if isinstance(other, PiecewiseFn):
            return pointwise("mul", self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> PiecewiseFn:
        c = _coeff(c)
        return normalize(
            PiecewiseFn(tuple(Piece(p.lo, p.hi, tuple(t.scaled(c) for t in p.terms)) for p in self.pieces))
        )

    def to_json(self) -> dict:
        return to_json(self)


# -- normalization -----------------------------------------------------------


def normalize(f: PiecewiseFn) -> PiecewiseFn:
    """Canonical form: like terms combined, zeros removed, equal neighbours merged.

    A partition that stops at a finite point is padded with an explicit zero
    tail; gaps, overlaps and a first piece not starting at 0 are errors.
    """
    pieces = list(f.pieces)
    if not pieces:
        raise PartitionError("no pieces")
    if pieces[0].lo != 0:
        raise PartitionError(f"partition starts at {pieces[0].lo}, not 0")
    for left, right in zip(pieces, pieces[1:]):
        if left.hi == INF or left.hi > right.lo:
            raise PartitionError(f"overlap at ({right.lo}, {left.hi})")
        if left.hi < right.lo:
            raise PartitionError(f"gap at ({left.hi}, {right.lo})")
    if pieces[-1].hi != INF:
        pieces.append(Piece(pieces[-1].hi, INF, ()))

    merged: list[Piece] = []
    for p in pieces:
        terms = combine_terms(p.terms)
        if merged and merged[-1].terms == terms:
            merged[-1] = Piece(merged[-1].lo, p.hi, terms)
        else:
            merged.append(Piece(p.lo, p.hi, terms))
    return PiecewiseFn(tuple(merged))


def _aligned(*fns: PiecewiseFn) -> Iterator[tuple[Fraction, Bound, list[tuple[Term, ...]]]]:
    """Walk the common refinement of several functions' partitions."""
    cuts = sorted({p.lo for f in fns for p in f.pieces} | {Fraction(0)})
    for lo, hi in zip(cuts, cuts[1:] + [INF]):
        yield lo, hi, [f.piece_at(lo).terms for f in fns]


def pointwise(op: str, f: PiecewiseFn, g: PiecewiseFn) -> PiecewiseFn:
    """Pointwise ``"add"`` or ``"mul"`` on the common refinement of breakpoints."""
    op = op.lower()
    pieces = []
    for lo, hi, (tf, tg) in _aligned(normalize(f), normalize(g)):
        if op == "add":
            terms = tf + tg
        elif op == "mul":
            terms = tuple(a * b for a in tf for b in tg)
        else:
            raise ValueError(f"unknown pointwise op {op!r}")
        pieces.append(Piece(lo, hi, terms))
    return normalize(PiecewiseFn(tuple(pieces)))


def restrict(f: PiecewiseFn, lo, hi) -> PiecewiseFn:
    """``f`` on (lo, hi), zero elsewhere."""
    lo, hi = to_rational(lo), to_bound(hi)
    cuts = [lo] + ([hi] if hi != INF else [])
    pieces = []
    for a, b, (terms, _) in _aligned(normalize(f), _indicator_cuts(cuts)):
        inside = a >= lo and b <= hi
        pieces.append(Piece(a, b, terms if inside else ()))
    return normalize(PiecewiseFn(tuple(pieces)))


def _indicator_cuts(cuts: list[Fraction]) -> PiecewiseFn:
    bounds = sorted({Fraction(0), *[c for c in cuts if c > 0]})
    return PiecewiseFn(tuple(Piece(a, b, ()) for a, b in zip(bounds, bounds[1:] + [INF])))


def symbolically_equal(f: PiecewiseFn, g: PiecewiseFn, rel_tol: float = 1e-12, abs_tol: float = 1e-14) -> bool:
    """Equality of normalized forms.

    Exact for rational coefficients.  Float coefficients compare with
    ``math.isclose``; a term present on one side only must be within ``abs_tol``
    of zero relative to the piece's coefficient scale.
    """
    f, g = normalize(f), normalize(g)
    if not (f.has_float_coeffs or g.has_float_coeffs):
        return f == g
    for _, _, (tf, tg) in _aligned(f, g):
        a = {t.key: t.coeff for t in tf}
        b = {t.key: t.coeff for t in tg}
        scale = max([abs(float(c)) for c in [*a.values(), *b.values()]] + [1.0])
        for key in a.keys() | b.keys():
            x, y = float(a.get(key, 0)), float(b.get(key, 0))
            if not math.isclose(x, y, rel_tol=rel_tol, abs_tol=abs_tol * scale):
                return False
    return True


# -- calculus ----------------------------------------------------------------


def differentiate(f: PiecewiseFn) -> PiecewiseFn:
    """Piecewise derivative; breakpoints are a null set and jumps are ignored."""
    pieces = []
    for p in normalize(f).pieces:
        terms = []
        for t in p.terms:
            if t.exp != 0:
                terms.append(Term(t.coeff * t.exp, t.exp - 1, t.logpow))
            if t.logpow:
                terms.append(Term(t.coeff * t.logpow, t.exp - 1, t.logpow - 1))
        pieces.append(Piece(p.lo, p.hi, tuple(terms)))
    return normalize(PiecewiseFn(tuple(pieces)))


def _term_antiderivative(t: Term) -> list[Term]:
    a1 = t.exp + 1
    k = t.logpow
    if a1 == 0:
        return [Term(t.coeff / (k + 1), 0, k + 1)]
    out = []
    factor = Fraction(1)
    for j in range(k + 1):
        out.append(Term(t.coeff * factor / a1 ** (j + 1), a1, k - j))
        factor *= -(k - j)
    return out


def sum_at(terms: Sequence[Term], x: Fraction) -> Coeff:
    """Term sum at a positive rational point, exact when every term is."""
    values = [t.exact_at(x) for t in terms]
    if any(isinstance(v, float) for v in values):
        return _cancel(math.fsum(float(v) for v in values), *values)
    return sum(values, Fraction(0))


def _magnitude_at(terms: Sequence[Term], x: Fraction) -> float:
    return math.fsum(abs(t(float(x))) for t in terms)


def antiderivative_from_zero(f: PiecewiseFn) -> PiecewiseFn:
    """``F(x) = integral of f over (0, x)``, continuous on (0, inf)."""
    f = normalize(f)
    first = f.pieces[0]
    if first.terms:
        worst = _leading_term(first.terms, Endpoint.ZERO)
        if worst.exp <= -1:
            raise NonIntegrableError(worst.exp, worst.logpow)

    pieces = []
    carry: Coeff = Fraction(0)
    # round-off carried along the chain of constants; zero while everything is exact
    slack = 0.0
    for p in f.pieces:
        prim = combine_terms(t for term in p.terms for t in _term_antiderivative(term))
        if p.lo == 0:
            const: Coeff = Fraction(0)
        else:
            at_lo = sum_at(prim, p.lo)
            const = _cancel(carry - at_lo, carry, at_lo)
            if isinstance(const, float):
                slack += 8 * _EPS * (abs(float(carry)) + abs(float(at_lo)) + _magnitude_at(prim, p.lo))
                if abs(const) <= slack:
                    const = Fraction(0)
        terms = combine_terms(prim + (Term(const, 0),))
        pieces.append(Piece(p.lo, p.hi, terms))
        if p.hi != INF:
            carry = sum_at(terms, p.hi)
            if isinstance(carry, float):
                slack += 8 * _EPS * _magnitude_at(terms, p.hi)
    return normalize(PiecewiseFn(tuple(pieces)))


def leading_behavior(f: PiecewiseFn, endpoint: Endpoint) -> LeadingBehavior | None:
    """Dominating term near ``endpoint``; None when f vanishes there."""
    endpoint = Endpoint(endpoint)
    f = normalize(f)
    piece = f.pieces[0] if endpoint is Endpoint.ZERO else f.pieces[-1]
    return terms_leading_behavior(piece.terms, endpoint)


def terms_leading_behavior(terms: Sequence[Term], endpoint: Endpoint) -> LeadingBehavior | None:
    t = _leading_term(terms, endpoint)
    if t is None:
        return None
    return LeadingBehavior(endpoint, t.exp, t.logpow, float(t.coeff))


def evaluate(f: PiecewiseFn, x) -> float:
    """Value at ``x > 0``; at a breakpoint the right-hand piece is used."""
    if not x > 0:
        raise ValueError(f"evaluate needs x > 0, got {x}")
    return f.piece_at(x)(x)


# -- integrability -----------------------------------------------------------


def piece_divergence(piece: Piece, p) -> Divergence | None:
    """Exact check that ``|f|**p`` is integrable on one piece (p finite)."""
    if piece.is_zero:
        return None
    if piece.lo == 0:
        t = _leading_term(piece.terms, Endpoint.ZERO)
        if t.exp * p <= -1:
            return Divergence(Endpoint.ZERO, t.exp * p, Fraction(t.logpow) * p)
    if piece.hi == INF:
        t = _leading_term(piece.terms, Endpoint.INFINITY)
        if t.exp * p >= -1:
            return Divergence(Endpoint.INFINITY, t.exp * p, Fraction(t.logpow) * p)
    return None


def lp_divergence(f: PiecewiseFn, p) -> Divergence | None:
    """Certificate that ``f`` is not in L_p, decided from exponents alone.

    For ``p = inf`` the certificate marks unboundedness at 0+ or at infinity.
    """
    f = normalize(f)
    if p == INF:
        first = _leading_term(f.pieces[0].terms, Endpoint.ZERO)
        if first is not None and (first.exp < 0 or (first.exp == 0 and first.logpow > 0)):
            return Divergence(Endpoint.ZERO, first.exp, Fraction(first.logpow))
        last = _leading_term(f.pieces[-1].terms, Endpoint.INFINITY)
        if last is not None and (last.exp > 0 or (last.exp == 0 and last.logpow > 0)):
            return Divergence(Endpoint.INFINITY, last.exp, Fraction(last.logpow))
        return None
    p = to_rational(p)
    for piece in f.pieces:
        cert = piece_divergence(piece, p)
        if cert is not None:
            return cert
    return None


# -- sign structure ----------------------------------------------------------


def _scaled_sum(terms: Sequence[Term], logx: float) -> float:
    """Sign-preserving rescaling of the term sum, safe from overflow."""
    ref = max(float(t.exp) for t in terms) if logx > 0 else min(float(t.exp) for t in terms)
    return math.fsum(
        float(t.coeff) * math.exp((float(t.exp) - ref) * logx) * logx**t.logpow for t in terms
    )


def _search_window(lo: Fraction, hi: Bound) -> tuple[float, float]:
    a = float(lo) if lo > 0 else (min(float(hi), 1.0) * 1e-15)
    b = float(hi) if hi != INF else max(float(lo), 1.0) * 1e15
    return a, b


def sign_changes(terms: Sequence[Term], lo: Fraction, hi: Bound, samples: int = 1024) -> list[float]:
    """Points in (lo, hi) where the term sum changes sign.

    Sign changes are bracketed on a log-spaced grid, then refined by
    safeguarded bisection (Brent).  Beyond the search window
    [1e-15, 1e15] (scaled to the piece) the leading term fixes the sign.
    """
    terms = [t for t in terms if t.coeff != 0]
    if not terms:
        return []
    if len(terms) == 1:
        t = terms[0]
        return [1.0] if t.logpow % 2 == 1 and lo < 1 < hi else []
    a, b = _search_window(lo, hi)
    la, lb = math.log(a), math.log(b)
    grid = [la + (lb - la) * i / samples for i in range(1, samples)]
    roots = []
    prev_l, prev_s = None, 0.0
    for l in grid:
        s = _scaled_sum(terms, l)
        if s == 0.0:
            roots.append(math.exp(l))
            prev_l, prev_s = l, 0.0
            continue
        if prev_l is not None and prev_s != 0.0 and (s > 0) != (prev_s > 0):
            root = brentq(lambda u: _scaled_sum(terms, u), prev_l, l, xtol=1e-15, rtol=4 * _EPS)
            roots.append(math.exp(root))
        prev_l, prev_s = l, s
    return sorted(r for r in roots if float(lo) < r < float(hi))


# -- serialization -----------------------------------------------------------


def _coeff_json(c: Coeff):
    return format_rational(c) if isinstance(c, Fraction) else c


def to_json(f: PiecewiseFn) -> dict:
    """``{pieces: [{lo, hi, terms: [{coeff, exp, logpow}]}]}``, rationals as "num/den"."""
    f = normalize(f)
    return {
        "pieces": [
            {
                "lo": format_rational(p.lo),
                "hi": "inf" if p.hi == INF else format_rational(p.hi),
                "terms": [
                    {"coeff": _coeff_json(t.coeff), "exp": format_rational(t.exp), "logpow": t.logpow}
                    for t in p.terms
                ],
            }
            for p in f.pieces
        ]
    }


def from_json(data: dict) -> PiecewiseFn:
    pieces = []
    for p in data["pieces"]:
        terms = []
        for t in p["terms"]:
            c = t["coeff"]
            c = c if isinstance(c, float) else to_rational(c)
            terms.append(Term(c, to_rational(t["exp"]), int(t.get("logpow", 0))))
        pieces.append(Piece(to_rational(p["lo"]), to_bound(p["hi"]), tuple(terms)))
    return normalize(PiecewiseFn(tuple(pieces)))
