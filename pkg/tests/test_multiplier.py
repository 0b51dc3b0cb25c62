import math
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from ordalg import families
from ordalg.algebra import AlgebraParams, Regime, ap_norm, gelfand_transform, lp_norm, sup_norm
from ordalg.multiplier import (
    Status,
    Verdict,
    check_absolutely_continuous,
    check_continuous,
    check_equal_exponent,
    check_mphi_prime_surrogate,
    check_necessary_r_gt_p,
    check_necessary_r_lt_p,
    check_sufficient_r_gt_p,
    check_sufficient_r_lt_p,
    classify,
    default_witness_pool,
    lp_growth_exponent,
    operator_norm_lower_bound,
    point_eval_constant,
    tv_growth_exponent,
    verify_witness,
    witness_search,
)
from ordalg.symfunc import INF, Endpoint, PiecewiseFn, leading_behavior, lp_divergence, normalize

R_GT_P = AlgebraParams(3, F(3, 2))
R_LT_P = AlgebraParams(F(3, 2), 3)


def fn(*pieces):
    return families.build(*pieces)


ONE = PiecewiseFn.constant(1)
DECAYING = families.decaying_multiplier(3, F(3, 2), F(1, 3))
GROWING = families.growing_multiplier(F(3, 2), 3, F(1, 6))
RAMP_TAIL = fn((0, 1, [(1, 0)]), (1, INF, [(1, 1)]))
JUMP = fn((0, 1, [(1, 0)]), (1, INF, [(2, 0)]))


def by_name(results):
    return {c.name: c for c in results}


def test_named_multipliers_have_expected_shape():
    assert normalize(DECAYING) == fn((0, 1, [(1, 0)]), (1, INF, [(1, F(-2, 3))]))
    assert normalize(GROWING) == fn((0, 1, [(1, 0)]), (1, INF, [(1, F(1, 2))]))


# -- regularity --------------------------------------------------------------


def test_absolute_continuity():
    assert check_absolutely_continuous(DECAYING).holds
    singular = check_absolutely_continuous(fn((0, 1, [(1, F(-1, 2))]), (1, INF, [(1, 0)])))
    assert singular.fails and "0+" in singular.evidence
    jump = check_absolutely_continuous(JUMP)
    assert jump.fails and jump.data["jump_at"] == "1/1"


def test_jump_certificate_reverifies():
    res = check_continuous(JUMP)
    b = F(res.data["jump_at"])
    left = JUMP.pieces[0](float(b))
    assert JUMP(b) == 2.0 and left == 1.0


# -- growth ------------------------------------------------------------------


def test_variation_growth():
    lb = tv_growth_exponent(DECAYING)
    assert (lb.exponent, lb.log_power) == (0, 0)
    assert lb.coeff == pytest.approx(1.0, rel=1e-12)  # integral of (2/3) t^(-5/3) over (1, inf)
    lb = tv_growth_exponent(GROWING)
    assert (lb.exponent, lb.log_power, lb.coeff) == (F(1, 2), 0, 1.0)
    assert tv_growth_exponent(ONE) is None


def test_variation_growth_needs_absolute_continuity():
    with pytest.raises(ValueError):
        tv_growth_exponent(JUMP)


def test_lp_growth_of_growing_multiplier():
    # (integral of t^(3/2) over (1, x))^(1/3) grows like x^(5/6)
    lb = lp_growth_exponent(GROWING, 3)
    assert lb.exponent == F(5, 6)


# -- surrogate ---------------------------------------------------------------


def test_surrogate_holds_for_decaying_multiplier():
    res = check_mphi_prime_surrogate(DECAYING, R_GT_P, 1, F(3, 2))
    assert res.holds
    # (2/3)^(3/2) * integral of x^(-5/2) over (1, inf), then the 2/3 root
    expected = ((2 / 3) ** 1.5 * (2 / 3)) ** (2 / 3)
    assert res.data["bound"] == pytest.approx(expected, rel=1e-12)


def test_surrogate_of_constant_is_zero():
    res = check_mphi_prime_surrogate(ONE, R_GT_P, 1, F(3, 2))
    assert res.holds and res.data["bound"] == 0


def test_surrogate_fails_for_nondecaying_derivative():
    for q in (1, F(5, 4), F(3, 2)):
        assert check_mphi_prime_surrogate(RAMP_TAIL, R_GT_P, 1, q).fails


def test_surrogate_exponent_limited_by_conjugate():
    with pytest.raises(ValueError):
        check_mphi_prime_surrogate(DECAYING, R_GT_P, 1, 2)


# -- r > p -------------------------------------------------------------------


def test_necessary_conditions_r_gt_p():
    assert all(c.holds for c in check_necessary_r_gt_p(ONE, R_GT_P))
    assert all(c.holds for c in check_necessary_r_gt_p(DECAYING, R_GT_P))
    res = by_name(check_necessary_r_gt_p(RAMP_TAIL, R_GT_P))
    assert res["thm3.i.phi-bounded"].fails
    assert classify(RAMP_TAIL, R_GT_P).verdict is Verdict.NOT_MULTIPLIER


def test_sufficient_conditions_r_gt_p():
    results, bound = check_sufficient_r_gt_p(DECAYING, R_GT_P)
    assert all(c.holds for c in results)
    expected = lp_norm(DECAYING, 3).value + sup_norm(DECAYING).value + by_name(results)["thm4.iii.mphi-prime-surrogate"].data["bound"]
    assert bound == pytest.approx(expected, rel=1e-15)
    results, bound = check_sufficient_r_gt_p(ONE, R_GT_P)
    assert by_name(results)["thm4.i.phi-in-Lv"].fails and bound is None
    results, bound = check_sufficient_r_gt_p(PiecewiseFn.zero(), R_GT_P)
    assert all(c.holds for c in results) and bound == 0


def test_zero_is_a_multiplier_with_zero_bound():
    rep = classify(PiecewiseFn.zero(), R_GT_P)
    assert rep.verdict is Verdict.MULTIPLIER
    assert rep.norm_upper_bound == 0 and rep.norm_lower_bound == 0


# -- r < p -------------------------------------------------------------------


def test_sufficient_conditions_r_lt_p():
    results, bound = check_sufficient_r_lt_p(ONE, R_LT_P)
    assert all(c.holds for c in results) and bound == 2
    results, _ = check_sufficient_r_lt_p(GROWING, R_LT_P)
    first = results[0]
    assert first.fails and "not in L_3" in first.evidence
    results, _ = check_sufficient_r_lt_p(DECAYING, R_LT_P)
    assert all(c.holds for c in results)
    assert classify(DECAYING, R_LT_P).verdict is Verdict.MULTIPLIER


def test_necessary_conditions_r_lt_p_for_growing_multiplier():
    res = by_name(check_necessary_r_lt_p(GROWING, R_LT_P))
    assert list(res) == ["thm7.continuous", "thm7.abs-continuous", "thm7.locally-Lp", "thm7.growth"]
    assert res["thm7.continuous"].holds
    assert res["thm7.abs-continuous"].holds
    assert res["thm7.locally-Lp"].holds
    # L_3 growth x^(5/6) exceeds 1/r = 2/3; variation growth x^(1/2) does not
    growth = res["thm7.growth"]
    assert growth.fails
    assert growth.data["lp_growth"]["exponent"] == "5/6"
    assert growth.data["tv_growth"]["exponent"] == "1/2"


def test_necessary_conditions_r_lt_p_failures():
    assert by_name(check_necessary_r_lt_p(JUMP, R_LT_P))["thm7.continuous"].fails
    local = by_name(check_necessary_r_lt_p(fn((0, 1, [(1, F(-1, 2))]), (1, INF, [(1, 0)])), R_LT_P))["thm7.locally-Lp"]
    assert local.fails and local.data["exponent_at_zero"] == "-3/2"


def test_log_factor_at_critical_exponent_admitted():
    # x^(2/3) ln x beyond 1: both growth rates are x^(2/3) ln x with 1/r = 2/3
    phi = fn((0, 1, []), (1, INF, [(1, F(2, 3), 1)]))
    growth = by_name(check_necessary_r_lt_p(phi, AlgebraParams(F(3, 2), INF)))["thm7.growth"]
    assert growth.holds
    assert "log factor" in growth.evidence


# -- r = p -------------------------------------------------------------------


def test_equal_exponent_conditions():
    params = AlgebraParams(2, 2)
    results, bound = check_equal_exponent(ONE, params)
    assert all(c.holds for c in results) and bound == 2
    rep = classify(ONE, params)
    assert rep.verdict is Verdict.MULTIPLIER
    assert rep.necessary == rep.sufficient
    assert rep.norm_lower_bound == pytest.approx(1.0, rel=1e-12)
    assert classify(JUMP, params).verdict is Verdict.NOT_MULTIPLIER


# -- witnesses ---------------------------------------------------------------


def test_witness_for_constant():
    w = witness_search(ONE, R_GT_P)
    assert w.alpha == F(1, 2)
    assert (w.failure.endpoint, w.failure.exponent) == (Endpoint.INFINITY, F(-3, 4))
    assert verify_witness(ONE, R_GT_P, w)


def test_witness_for_growing_multiplier():
    w = witness_search(GROWING, R_LT_P)
    assert w.alpha == F(5, 6)
    tail = normalize(GROWING * gelfand_transform(w.f)).pieces[-1]
    assert [(t.coeff, t.exp, t.logpow) for t in tail.terms] == [(1, F(-1, 3), 0)]
    assert verify_witness(GROWING, R_LT_P, w)


def test_no_witness_for_decaying_multiplier():
    assert witness_search(DECAYING, R_GT_P) is None


def test_classify_examples():
    assert classify(ONE, R_GT_P).verdict is Verdict.NOT_MULTIPLIER
    rep = classify(DECAYING, R_GT_P)
    assert rep.verdict is Verdict.MULTIPLIER
    assert rep.regime is Regime.R_GT_P
    assert rep.norm_lower_bound <= rep.norm_upper_bound
    rep = classify(GROWING, R_LT_P)
    assert rep.verdict is Verdict.NOT_MULTIPLIER and rep.witness is not None


def test_undetermined_gap():
    # unbounded, so no sufficient set applies, yet phi F stays bounded for every witness
    phi = fn((0, 1, []), (1, INF, [(1, F(2, 3), 1)]))
    rep = classify(phi, AlgebraParams(F(3, 2), INF))
    assert rep.verdict is Verdict.UNDETERMINED
    assert rep.witness is None
    assert rep.norm_upper_bound is None


# -- bounds ------------------------------------------------------------------


def test_lower_bound_examples():
    params = AlgebraParams(2, 2)
    assert operator_norm_lower_bound(PiecewiseFn.zero(), R_GT_P, default_witness_pool(R_GT_P)) == 0
    for f in default_witness_pool(params)[::5]:
        assert operator_norm_lower_bound(ONE, params, [f]) == pytest.approx(1.0, rel=1e-12)
    assert operator_norm_lower_bound(ONE, params, []) == 0


def test_lower_bound_below_upper_bound():
    pool = default_witness_pool(R_GT_P)
    assert len(pool) == 20
    assert all(ap_norm(f, 3).finite for f in pool)
    rep = classify(DECAYING, R_GT_P, lower_bound=False)
    lower = operator_norm_lower_bound(DECAYING, R_GT_P, pool)
    assert lower <= rep.norm_upper_bound
    assert sup_norm(DECAYING).value <= 2 * rep.norm_upper_bound


def test_threads_do_not_change_the_bound():
    pool = default_witness_pool(R_GT_P)
    assert operator_norm_lower_bound(DECAYING, R_GT_P, pool, threads=4) == operator_norm_lower_bound(DECAYING, R_GT_P, pool)


# -- point evaluation --------------------------------------------------------


@pytest.mark.parametrize("p", [1, F(3, 2), 2, 5, INF])
def test_point_eval_at_most_one_and_monotone(p):
    xs = [F(1, 2**k) for k in range(12, 0, -1)] + [F(1), F(3, 2), F(10), F(1000)]
    values = [point_eval_constant(x, p) for x in xs]
    assert all(0 < v <= 1 for v in values)
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_point_eval_beats_best_spike_width():
    # spike of width w at 1: ||f||_1 = 2 and ||F||_1 = w, so F(1) / |||f|||_1 = 1 / (2 + w)
    best = minimize_scalar(lambda w: -1 / (2 + w), bounds=(1e-9, 1), method="bounded")
    assert point_eval_constant(1, 1) >= -best.fun - 1e-9


def test_point_eval_rejects_nonpositive():
    with pytest.raises(ValueError):
        point_eval_constant(0, 2)


# -- properties --------------------------------------------------------------


@st.composite
def multipliers(draw):
    rng = random.Random(draw(st.integers(0, 2**32)))
    kind = draw(st.sampled_from(["decaying", "unit", "grid"]))
    if kind == "decaying":
        return families.random_decaying_multiplier(rng)
    return families.random_family_fn(rng, kind)


exponent_pairs = st.sampled_from(
    [(3, F(3, 2)), (2, 1), (INF, 2), (F(3, 2), 3), (1, 2), (2, INF), (2, 2), (1, 1), (INF, INF)]
)


def _recheck_failure(phi, params, c):
    data = c.data
    if "jump_at" in data:
        b = F(data["jump_at"])
        left = normalize(phi).piece_at(b - F(1, 10**12))
        assert not math.isclose(left(float(b)), phi(b), rel_tol=1e-12, abs_tol=1e-14)
    if "divergence" in data:
        d = data["divergence"]
        lb = leading_behavior(phi, Endpoint(d["endpoint"]))
        assert lb is not None and lp_divergence(phi, INF) is not None
    if "exponent_at_zero" in data:
        lb = leading_behavior(phi, Endpoint.ZERO)
        if params.p == INF:
            assert lb.exponent < 0 or (lb.exponent == 0 and lb.log_power > 0)
        else:
            assert lb.exponent * params.p == F(data["exponent_at_zero"]) <= -1


@settings(max_examples=40, deadline=None)
@given(multipliers(), exponent_pairs)
def test_classification_soundness(phi, pair):
    params = AlgebraParams(*pair)
    rep = classify(phi, params, lower_bound=False)
    for c in rep.necessary + rep.sufficient:
        if c.status is Status.FAILS:
            _recheck_failure(phi, params, c)
    if rep.witness is not None:
        assert verify_witness(phi, params, rep.witness)
        assert rep.verdict is not Verdict.MULTIPLIER
    if rep.verdict is Verdict.MULTIPLIER:
        assert rep.witness is None
        assert not any(c.fails for c in rep.necessary)
        assert rep.norm_upper_bound is not None
        if params.regime is Regime.R_GT_P:
            assert sup_norm(phi).value <= 2 * rep.norm_upper_bound
    else:
        assert rep.norm_upper_bound is None


@settings(max_examples=15, deadline=None)
@given(multipliers(), exponent_pairs)
def test_bounds_ordered(phi, pair):
    rep = classify(phi, AlgebraParams(*pair))
    if rep.norm_lower_bound is not None:
        assert rep.norm_lower_bound <= rep.norm_upper_bound * (1 + 1e-9)


@settings(max_examples=30, deadline=None)
@given(multipliers(), st.sampled_from([1, F(3, 2), 2, 3]), st.sampled_from([F(3, 2), 2, 3, 4, INF]))
def test_regime_monotonicity(phi, r, p):
    if not r < p:
        return
    if classify(phi, AlgebraParams(r, r), lower_bound=False).verdict is Verdict.MULTIPLIER:
        assert classify(phi, AlgebraParams(r, p), lower_bound=False).verdict is not Verdict.NOT_MULTIPLIER


@settings(max_examples=30, deadline=None)
@given(multipliers(), exponent_pairs)
def test_classification_is_deterministic(phi, pair):
    params = AlgebraParams(*pair)
    assert classify(phi, params, lower_bound=False).to_json() == classify(phi, params, lower_bound=False).to_json()
