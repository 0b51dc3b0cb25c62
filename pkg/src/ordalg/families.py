"""Named test functions and seeded random generators.

Every builder returns a normalized ``PiecewiseFn``.  Random generators take a
``random.Random`` so callers control reproducibility.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .symfunc import INF, Piece, PiecewiseFn, Term, differentiate, exact_pow, normalize, to_rational


def build(*pieces) -> PiecewiseFn:
    """``build((lo, hi, [(c, a[, k]), ...]), ...)`` with a zero tail added if needed."""
    return PiecewiseFn.build(pieces)


# -- fixed examples ----------------------------------------------------------


def power_tail_witness(alpha) -> PiecewiseFn:
    """``f`` whose transform is ``x`` on (0, 1) and ``x**-alpha`` on [1, inf)."""
    alpha = to_rational(alpha)
    return build((0, 1, [(1, 0)]), (1, INF, [(-alpha, -alpha - 1)]))


def power_tail_transform(alpha) -> PiecewiseFn:
    alpha = to_rational(alpha)
    return build((0, 1, [(1, 1)]), (1, INF, [(1, -alpha)]))


def decaying_multiplier(r, p, eps) -> PiecewiseFn:
    """``1`` on (0, 1], ``x**(-1/v - eps)`` beyond, with ``1/v = 1/p - 1/r``."""
    inv_v = 1 / to_rational(p) - (0 if r == INF else 1 / to_rational(r))
    return build((0, 1, [(1, 0)]), (1, INF, [(1, -inv_v - to_rational(eps))]))


def growing_multiplier(r, p, eps) -> PiecewiseFn:
    """``1`` on (0, 1), ``x**(1/r - 1/p + eps)`` beyond."""
    e = (0 if r == INF else 1 / to_rational(r)) - (0 if p == INF else 1 / to_rational(p)) + to_rational(eps)
    return build((0, 1, [(1, 0)]), (1, INF, [(1, e)]))


def tent(a, b, c) -> PiecewiseFn:
    """``1/a`` on (0, a), ``0`` on [a, b), ``-1/(c - b)`` on [b, c), 0 after.

    Its transform rises linearly to 1, stays there, then falls back to 0.
    """
    a, b, c = to_rational(a), to_rational(b), to_rational(c)
    if not 0 < a < b < c:
        raise ValueError("tent needs 0 < a < b < c")
    return build((0, a, [(1 / a, 0)]), (a, b, []), (b, c, [(-1 / (c - b), 0)]))


def tent_ap_norm(a, b, c, r) -> float:
    """``2 + ((c + r (b - a)) / (r + 1))**(1/r)``."""
    a, b, c, r = (float(to_rational(v)) for v in (a, b, c, r))
    return 2.0 + ((c + r * (b - a)) / (r + 1.0)) ** (1.0 / r)


def spike(x, w) -> PiecewiseFn:
    """``1/w`` on (x - w, x), ``-1/w`` on (x, x + w): transform peaks at 1 at x."""
    x, w = to_rational(x), to_rational(w)
    if not 0 < w <= x:
        raise ValueError("spike needs 0 < w <= x")
    pieces = [] if x == w else [(0, x - w, [])]
    pieces += [(x - w, x, [(1 / w, 0)]), (x, x + w, [(-1 / w, 0)])]
    return build(*pieces)


def box(w, height=1) -> PiecewiseFn:
    return build((0, to_rational(w), [(to_rational(height), 0)]))


def approximate_unit(n) -> PiecewiseFn:
    """``e_n = n`` on (0, 1/n)."""
    n = to_rational(n)
    return box(1 / n, n)


# -- random generators -------------------------------------------------------

_UNIT_EXPONENTS = [Fraction(k, 2) for k in range(-1, 7)] + [Fraction(1, 3), Fraction(2, 3)]


def _random_terms(rng: random.Random, exps, max_log: int, count: int) -> list[tuple]:
    out = []
    for _ in range(count):
        c = Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 6))
        out.append((c, rng.choice(exps), rng.randint(0, max_log)))
    return out


def random_family_fn(rng: random.Random, family: str = "unit") -> PiecewiseFn:
    """Random function integrable at 0+ whose transform stays exactly rational.

    ``unit``: one breakpoint at 1, rational exponents, log factors allowed.
    ``grid``: breakpoints among 1/2, 1, 2, 3 with integer exponents.
    ``sqrt``: breakpoints among 1/4, 1, 4, 9 with half-integer exponents.
    """
    if family == "unit":
        cuts, exps, max_log = [Fraction(1)], _UNIT_EXPONENTS, 2
    elif family == "grid":
        pool = [Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]
        cuts = sorted(rng.sample(pool, rng.randint(1, 3)))
        exps, max_log = [Fraction(k) for k in range(-3, 4) if k != -1], 0
    elif family == "sqrt":
        pool = [Fraction(1, 4), Fraction(1), Fraction(4), Fraction(9)]
        cuts = sorted(rng.sample(pool, rng.randint(1, 3)))
        exps, max_log = [Fraction(k, 2) for k in range(-5, 6, 2)], 0
    else:
        raise ValueError(f"unknown family {family!r}")
    bounds = [Fraction(0)] + cuts + [INF]
    pieces = []
    for i, (lo, hi) in enumerate(zip(bounds, bounds[1:])):
        allowed = [e for e in exps if e > -1] if i == 0 else exps
        terms = _random_terms(rng, allowed, max_log, rng.randint(0, 3))
        pieces.append((lo, hi, terms))
    return build(*pieces)


def random_pure_power(rng: random.Random) -> tuple[PiecewiseFn, Fraction]:
    """Single pure-power pieces on a random partition, with a random exponent p."""
    p = rng.choice([Fraction(1), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5, 2), Fraction(4)])
    cuts = sorted({Fraction(rng.randint(1, 16), rng.randint(1, 4)) for _ in range(rng.randint(1, 3))})
    bounds = [Fraction(0)] + cuts + [INF]
    pieces = []
    for lo, hi in zip(bounds, bounds[1:]):
        c = Fraction(rng.randint(1, 9), rng.randint(1, 4)) * rng.choice([-1, 1])
        e = Fraction(rng.randint(-12, 12), rng.choice([2, 3, 4]))
        pieces.append((lo, hi, [(c, e)]))
    return build(*pieces), p


def _through(y, x0, a):
    """Coefficient ``c`` with ``c * x0**a = y``; float only if ``x0**a`` is irrational."""
    power = exact_pow(x0, a)
    return y / power if power is not None else float(y) / float(x0) ** float(a)


def random_unit_ball_candidate(rng: random.Random, p) -> PiecewiseFn:
    """Random ``f`` in A_p built from its transform.

    The transform is a power ``c x**a`` (a > 0) up to a first node, piecewise
    linear through random nodes, then ``y (x / n)**-alpha`` with alpha > 1/p.
    """
    p = to_rational(p)
    nodes = sorted({Fraction(rng.randint(1, 40), 8) for _ in range(rng.randint(2, 5))})
    ys = [Fraction(rng.randint(-8, 8) or 1, rng.randint(1, 4)) for _ in nodes]
    a = Fraction(rng.randint(1, 8), rng.choice([2, 3, 4]))
    alpha = 1 / p + Fraction(rng.randint(1, 12), 4)
    n0, y0 = nodes[0], ys[0]
    pieces = [Piece(0, n0, (Term(_through(y0, n0, a), a),))]
    for (s, ys_), (t, yt) in zip(zip(nodes, ys), zip(nodes[1:], ys[1:])):
        slope = (yt - ys_) / (t - s)
        pieces.append(Piece(s, t, (Term(ys_ - slope * s, 0), Term(slope, 1))))
    nl, yl = nodes[-1], ys[-1]
    pieces.append(Piece(nl, INF, (Term(_through(yl, nl, -alpha), -alpha),)))
    return differentiate(normalize(PiecewiseFn(tuple(pieces))))


def random_tent_params(rng: random.Random) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    a = Fraction(rng.randint(1, 40), rng.randint(1, 8))
    b = a + Fraction(rng.randint(1, 40), rng.randint(1, 8))
    c = b + Fraction(rng.randint(1, 40), rng.randint(1, 8))
    r = Fraction(rng.randint(4, 16), 4)
    return a, b, c, r


def random_decaying_multiplier(rng: random.Random) -> PiecewiseFn:
    """Bounded, continuous, ``1`` near 0, decaying like ``x**-e`` (e > 0) past a knee."""
    knee = Fraction(rng.randint(1, 8), rng.randint(1, 4))
    e = Fraction(rng.randint(1, 12), rng.choice([2, 3, 4]))
    level = Fraction(rng.randint(1, 9), rng.randint(1, 4))
    return build((0, knee, [(level, 0)]), (knee, INF, [(_through(level, knee, -e), -e)]))
