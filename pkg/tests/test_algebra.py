import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from ordalg import families
from ordalg.algebra import (
    AlgebraParams,
    Method,
    NormValue,
    NotInL1Error,
    Regime,
    ap_norm,
    conjugate,
    gelfand_transform,
    in_ap,
    lp_norm,
    order_convolve,
    sup_norm,
    to_exponent,
    transform_at_infinity,
)
from ordalg.oracle import quad_integral, quad_lp_norm
from ordalg.symfunc import INF, Endpoint, PiecewiseFn, lp_divergence, normalize, restrict, symbolically_equal


def fn(*pieces):
    return families.build(*pieces)


def shape(f):
    return [(p.lo, p.hi, [(t.coeff, t.exp, t.logpow) for t in p.terms]) for p in normalize(f).pieces]


# -- parameters --------------------------------------------------------------


def test_params_derived_exponents():
    ap = AlgebraParams(3, F(3, 2))
    assert ap.regime is Regime.R_GT_P
    assert ap.v == 3
    assert ap.r_conj == F(3, 2)
    assert AlgebraParams(F(3, 2), 3).regime is Regime.R_LT_P
    assert AlgebraParams(2, 2).regime is Regime.R_EQ_P
    assert AlgebraParams(INF, 2).v == 2
    with pytest.raises(ValueError):
        AlgebraParams(2, 3).v


def test_conjugates():
    assert conjugate(F(3, 2)) == 3
    assert conjugate(1) == INF
    assert conjugate(INF) == 1


@pytest.mark.parametrize("bad", [F(1, 2), "0", "-3"])
def test_exponent_below_one_rejected(bad):
    with pytest.raises(ValueError):
        to_exponent(bad)


def test_norm_value_invariants():
    with pytest.raises(ValueError):
        NormValue(INF)
    with pytest.raises(ValueError):
        NormValue(1.0, Method.EXACT, None, 1e-3)
    with pytest.raises(ValueError):
        NormValue(-1.0)


# -- convolution and transform -----------------------------------------------


def test_box_convolved_with_itself():
    box = families.box(1)
    assert shape(order_convolve(box, box)) == [(0, 1, [(2, 1, 0)]), (1, INF, [])]


def test_box_convolved_with_ramp():
    f, g = families.box(1), fn((0, 1, [(1, 1)]))
    h = order_convolve(f, g)
    assert shape(h) == [(0, 1, [(F(3, 2), 2, 0)]), (1, INF, [])]
    assert quad_integral(h).value == pytest.approx(0.5, rel=1e-12)
    assert transform_at_infinity(h) == F(1, 2) == transform_at_infinity(f) * transform_at_infinity(g)


def test_convolve_with_zero():
    rng = random.Random(3)
    f = families.random_family_fn(rng)
    assert order_convolve(f, PiecewiseFn.zero()).is_zero


def test_transform_examples():
    assert shape(gelfand_transform(families.power_tail_witness(F(1, 2)))) == [
        (0, 1, [(1, 1, 0)]),
        (1, INF, [(1, F(-1, 2), 0)]),
    ]
    assert gelfand_transform(PiecewiseFn.zero()).is_zero


def test_tent_transform():
    big_f = gelfand_transform(families.tent(1, 2, 3))
    assert shape(big_f) == [(0, 1, [(1, 1, 0)]), (1, 2, [(1, 0, 0)]), (2, 3, [(3, 0, 0), (-1, 1, 0)]), (3, INF, [])]


def test_transform_requires_l1():
    with pytest.raises(NotInL1Error) as err:
        gelfand_transform(fn((0, INF, [(1, 0)])))
    assert err.value.certificate.endpoint is Endpoint.INFINITY


# -- norms -------------------------------------------------------------------


def test_witness_transform_norms():
    big_f = families.power_tail_transform(F(1, 2))
    cubed = lp_norm(big_f, 3)
    assert cubed.method is Method.EXACT
    assert cubed.value**3 == pytest.approx(9 / 4, rel=1e-14)
    div = lp_norm(big_f, F(3, 2))
    assert div.value == INF
    assert (div.divergence.endpoint, div.divergence.exponent) == (Endpoint.INFINITY, F(-3, 4))


@pytest.mark.parametrize("p", [1, F(3, 2), 2, 7, INF])
def test_zero_norm(p):
    assert lp_norm(PiecewiseFn.zero(), p).value == 0


def test_tent_ap_norm_example():
    assert ap_norm(families.tent(1, 2, 3), 2).value == pytest.approx(2 + math.sqrt(5 / 3), rel=1e-12)
    assert 2 + math.sqrt(5 / 3) == pytest.approx(3.29099, abs=1e-5)


def test_box_scaled_to_unit_norm():
    # On (0, 1) the transform is c x, whose L_{3/2} norm is c (2/5)^(2/3).
    c = 1 / (1 + (2 / 5) ** (2 / 3))
    f = families.box(1).scale(c)
    head = lp_norm(restrict(gelfand_transform(f), 0, 1), F(3, 2)).value
    assert lp_norm(f, 1).value + head == pytest.approx(1.0, rel=1e-14)
    # beyond 1 the transform stays at c, so the full norm diverges
    full = ap_norm(f, F(3, 2))
    assert full.value == INF
    assert (full.divergence.endpoint, full.divergence.exponent) == (Endpoint.INFINITY, 0)


def test_witness_in_a3_not_in_a3_2():
    f = families.power_tail_witness(F(1, 2))
    assert not in_ap(f, F(3, 2))
    assert in_ap(f, 3)


def test_quadrature_norms_carry_error_bound():
    f = fn((0, 1, [(1, 1, 1)]))
    n = lp_norm(f, 2)
    assert n.method is Method.QUADRATURE
    assert abs(n.value - math.sqrt(2 / 27)) <= max(n.error_bound, 1e-12)


def test_affine_pieces_are_exact():
    n = lp_norm(fn((0, 2, [(1, 0), (-1, 1)])), 3)
    assert n.method is Method.EXACT
    assert n.value == pytest.approx((2 * 0.25) ** (1 / 3), rel=1e-14)


def test_sup_norm_interior_extremum():
    # x - x^2 on (0, 1) peaks at 1/4
    assert sup_norm(fn((0, 1, [(1, 1), (-1, 2)]))).value == pytest.approx(0.25, rel=1e-12)
    assert sup_norm(fn((0, 1, [(1, F(-1, 2))]))).value == INF


# -- properties --------------------------------------------------------------


@st.composite
def l1_fns(draw):
    rng = random.Random(draw(st.integers(0, 2**32)))
    f = families.random_family_fn(rng, draw(st.sampled_from(["unit", "grid", "sqrt"])))
    if lp_divergence(f, 1) is None:
        return f
    # keep the head, swap the tail for an integrable one
    cut = f.pieces[-1].lo
    tail = fn((0, cut, []), (cut, INF, [(draw(st.integers(-5, 5)), draw(st.sampled_from([F(-3, 2), F(-2), F(-3)])))]))
    f = restrict(f, 0, cut) + tail
    assume(lp_divergence(f, 1) is None)
    return f


@st.composite
def zero_integrable_fns(draw):
    rng = random.Random(draw(st.integers(0, 2**32)))
    return families.random_family_fn(rng, draw(st.sampled_from(["unit", "grid", "sqrt"])))


@settings(max_examples=40, deadline=None)
@given(zero_integrable_fns(), zero_integrable_fns())
def test_convolution_commutes(f, g):
    assert order_convolve(f, g) == order_convolve(g, f)


@settings(max_examples=25, deadline=None)
@given(zero_integrable_fns(), zero_integrable_fns(), zero_integrable_fns())
def test_convolution_associates(f, g, h):
    assert symbolically_equal(order_convolve(order_convolve(f, g), h), order_convolve(f, order_convolve(g, h)))


@settings(max_examples=40, deadline=None)
@given(l1_fns(), l1_fns())
def test_banach_bound(f, g):
    lhs = lp_norm(order_convolve(f, g), 1)
    rhs = lp_norm(f, 1).value * lp_norm(g, 1).value
    assert lhs.value <= rhs * (1 + 1e-9) + lhs.error_bound


positive_power_fns = st.builds(
    lambda c1, a, c2, b: fn((0, 1, [(c1, a)]), (1, INF, [(c2, b)])),
    st.builds(F, st.integers(1, 9), st.integers(1, 4)),
    st.sampled_from([F(k, 4) for k in range(-3, 9)]),
    st.builds(F, st.integers(1, 9), st.integers(1, 4)),
    st.sampled_from([F(-k, 4) for k in range(5, 16)]),
)


@settings(max_examples=40, deadline=None)
@given(positive_power_fns, positive_power_fns)
def test_banach_bound_is_equality_for_nonnegative(f, g):
    lhs = lp_norm(order_convolve(f, g), 1)
    assert lhs.value == pytest.approx(lp_norm(f, 1).value * lp_norm(g, 1).value, rel=1e-9)


@settings(max_examples=40, deadline=None)
@given(l1_fns())
def test_transform_bounded_by_l1_norm(f):
    assert sup_norm(gelfand_transform(f)).value <= lp_norm(f, 1).value * (1 + 1e-9)


@settings(max_examples=30, deadline=None)
@given(l1_fns(), st.sampled_from([(1, F(3, 2)), (F(3, 2), 3), (2, 4), (2, INF)]))
def test_ap_nesting(f, pr):
    p, r = pr
    if in_ap(f, p):
        assert in_ap(f, r)


@settings(max_examples=30, deadline=None)
@given(l1_fns(), st.sampled_from([1, F(3, 2), 2, 3]))
def test_exact_norm_matches_quadrature(f, p):
    exact = lp_norm(f, p)
    if exact.finite and exact.value > 0:
        quad = quad_lp_norm(f, p)
        assert quad.value == pytest.approx(exact.value, rel=1e-8)
