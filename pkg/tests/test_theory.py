import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subtensor import InvalidParam, OverlapVector
from subtensor.theory import (
    ProblemParams,
    binary_entropy,
    bivariate_tail_upper,
    borell_tis_two_sided,
    correlation_lambda,
    counting_tail,
    counting_tail_report,
    e_max,
    expected_max_gaussians,
    gauss_max_centering,
    gaussian_tail_bounds,
    igp_informal_estimate,
    igpt_guarantee_ratio,
    igpt_step_weights,
    log_binomial,
    log_expected_count,
    ogp_exponent_psi,
    second_moment_lower_bound,
)

mp.mp.dps = 50


def mp_e_max(n, k, p):
    return mp.sqrt(2 * p / mp.mpf(k) ** p * mp.log(mp.binomial(n, k)))


def test_log_binomial_examples():
    assert log_binomial(4, 2) == pytest.approx(math.log(6), rel=1e-15)
    assert log_binomial(7, 0) == 0.0
    exact = math.log(math.comb(50, 25))
    assert log_binomial(50, 25) == pytest.approx(exact, rel=1e-12)


def test_log_binomial_large_uses_lgamma_accurately():
    want = float(mp.log(mp.binomial(100000, 40000)))
    assert log_binomial(100000, 40000) == pytest.approx(want, rel=1e-12)


def test_e_max_oracles():
    assert e_max(ProblemParams(4, 2, 2)) == pytest.approx(float(mp_e_max(4, 2, 2)), rel=1e-14)
    assert e_max(ProblemParams(4, 2, 2)) == pytest.approx(1.3385662, abs=1e-7)
    assert e_max(ProblemParams(100, 5, 3)) == pytest.approx(float(mp_e_max(100, 5, 3)), rel=1e-12)
    assert e_max(ProblemParams(6, 6, 3)) == 0.0


def test_problem_params_guards():
    with pytest.raises(InvalidParam):
        ProblemParams(3, 4, 2)
    with pytest.raises(InvalidParam):
        ProblemParams(3, 2, 0)
    assert ProblemParams(5, 5, 2).near_full
    assert not ProblemParams(5, 2, 2).near_full


def test_correlation_lambda():
    assert correlation_lambda(OverlapVector((2, 2), 2)) == 1.0
    assert correlation_lambda(OverlapVector((0, 2), 2)) == 0.0
    assert correlation_lambda(OverlapVector((1, 2), 2)) == 0.5


def test_gaussian_tail_at_one():
    lo, up, exact = gaussian_tail_bounds(1.0)
    assert exact == pytest.approx(float(mp.ncdf(-1)), rel=1e-14)
    assert exact == pytest.approx(0.1586553, abs=1e-7)
    assert up == pytest.approx(0.2419707, abs=1e-7)
    assert lo == pytest.approx(0.5 * up, rel=1e-15)
    assert lo <= exact <= up


def test_gaussian_tail_large_x_ratio():
    _, up, exact = gaussian_tail_bounds(5.0)
    assert 1.0 <= up / exact <= 1.05


@pytest.mark.parametrize("x", [0.5 * i for i in range(1, 17)])
def test_gaussian_tail_sandwich_grid(x):
    lo, up, exact = gaussian_tail_bounds(x)
    assert exact == pytest.approx(float(mp.ncdf(-x)), rel=1e-12)
    assert lo <= exact <= up


def test_gaussian_tail_domain():
    with pytest.raises(InvalidParam):
        gaussian_tail_bounds(0.0)


def test_bivariate_tail_independent_case():
    b = bivariate_tail_upper(0.0, 2.0)
    assert b == pytest.approx(math.exp(-4) / (8 * math.pi), rel=1e-14)
    assert b == pytest.approx(7.288e-4, rel=1e-3)
    q2 = float(mp.ncdf(-2)) ** 2
    assert q2 == pytest.approx(5.18e-4, rel=1e-3)
    assert q2 <= b


def test_bivariate_tail_domain():
    assert math.isfinite(bivariate_tail_upper(0.999, 1.0))
    with pytest.raises(InvalidParam):
        bivariate_tail_upper(1.0, 1.0)
    with pytest.raises(InvalidParam):
        bivariate_tail_upper(0.5, 0.0)


@pytest.mark.parametrize("rho", [0.0, 0.3, 0.5, 0.8])
@pytest.mark.parametrize("u", [1.0, 1.5, 2.0])
def test_bivariate_tail_dominates_exact_probability(rho, u):
    # exact joint tail: integrate phi(x) * P[Z_rho > u | Z = x] over x > u
    s = math.sqrt(1 - rho * rho)
    f = lambda x: mp.npdf(x) * mp.ncdf((rho * x - u) / s)
    exact = float(mp.quad(f, [u, mp.inf]))
    assert exact <= bivariate_tail_upper(rho, u)


def test_counting_tail_examples():
    assert counting_tail(10, 3, 1e-6) == pytest.approx(1.0, rel=1e-12)
    assert counting_tail(6, 2, 0.6) == pytest.approx(9.0, rel=1e-12)


def test_counting_tail_matches_big_integer_sum():
    n, k, delta = 40, 10, 0.45
    want = sum(math.comb(k, a) * math.comb(n - k, k - a) for a in range(k + 1) if a > (1 - delta) * k)
    assert counting_tail(n, k, delta) == pytest.approx(want, rel=1e-12)


def test_counting_tail_monotone_in_delta():
    vals = [counting_tail(30, 8, d) for d in np.linspace(0.01, 0.99, 50)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_counting_tail_report_flags_conditions():
    ok = counting_tail_report(1000, 10, 0.05, 0.9)
    assert ok.precondition and ok.satisfied
    bad = counting_tail_report(20, 10, 0.4, 0.3)
    assert not bad.precondition


def _mp_second_moment(n, k, p, eps, delta):
    x = (1 - mp.mpf(delta)) ** (mp.mpf(eps) * p / 2)
    ebar2 = (1 - mp.mpf(eps)) ** 2 * 2 * p * mp.log(mp.binomial(n, k))
    return 1 / ((1 + x) ** 2 / mp.sqrt(1 - x * x) * mp.exp(x * ebar2))


def test_second_moment_high_precision():
    got = second_moment_lower_bound(ProblemParams(20, 4, 8), 0.5, 0.3)
    assert got == pytest.approx(float(_mp_second_moment(20, 4, 8, 0.5, 0.3)), rel=1e-10)


def test_second_moment_limit_tends_to_one():
    vals = [second_moment_lower_bound(ProblemParams(20, 4, p), 0.9, 0.9) for p in (20, 50, 200)]
    assert all(0 < v <= 1 for v in vals)
    assert vals[0] < 1
    assert vals[-1] > 1 - 1e-6


def test_second_moment_monotone_in_p_when_exponent_dominates():
    vals = [second_moment_lower_bound(ProblemParams(20, 4, p), 0.9, 0.5) for p in range(4, 17)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_second_moment_not_monotone_at_moderate_exponent():
    # p (1-delta)^(eps p / 2) grows until p ~ 2 / (eps |ln(1-delta)|), so the bound dips first
    vals = [second_moment_lower_bound(ProblemParams(20, 4, p), 0.5, 0.3) for p in range(4, 17)]
    assert vals[1] < vals[0] and vals[-1] > vals[7]


def test_igpt_ratio_values():
    assert igpt_guarantee_ratio(1) == 1.0
    assert igpt_guarantee_ratio(2) == pytest.approx(2 * math.sqrt(2) / 3, rel=1e-15)
    vals = [igpt_guarantee_ratio(p) for p in range(1, 200)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    assert all(v <= 2 / math.sqrt(p) for p, v in enumerate(vals, 1))


def test_informal_estimate_matches_ratio_times_asymptotic_emax():
    # E_max at p=2 with ln C(N,k) replaced by k ln N is 2 sqrt(ln N / k)
    n, k = 10**6, 7
    assert igp_informal_estimate(n, k) == pytest.approx(
        igpt_guarantee_ratio(2) * 2 * math.sqrt(math.log(n) / k), rel=1e-14
    )


def test_log_expected_count_zero_at_emax_scale():
    # at E_max the Gaussian tail is exp(-p lnC) up to a polynomial factor
    params = ProblemParams(200, 3, 3)
    val = log_expected_count(params, e_max(params))
    assert -10 < val < 0


def test_borell_tis_values():
    assert borell_tis_two_sided(0.0, 2, 3) == 2.0
    assert borell_tis_two_sided(2 * 2 ** -1.5, 2, 3) == pytest.approx(2 * math.exp(-2), rel=1e-14)


def test_expected_max_gaussians_against_mpmath():
    n = 250
    f = lambda x: n * x * mp.npdf(x) * mp.ncdf(x) ** (n - 1)
    want = float(mp.quad(f, [-mp.inf, 0, 3, mp.inf]))
    assert expected_max_gaussians(n) == pytest.approx(want, rel=1e-9)
    assert expected_max_gaussians(2) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-9)


def test_gauss_max_centering_close_to_expected_max():
    for n in (10**3, 10**5):
        assert abs(gauss_max_centering(n) - expected_max_gaussians(n)) < 0.4


def test_step_weights():
    w = igpt_step_weights(4, 3)
    assert w.shape == (3, 3)
    # j = 1, t = 2: (t-1)^(p-1) = 1 ; j = 3, t = 4: t^(p-1) = 16
    assert w[0, 0] == 1.0 and w[2, 2] == 16.0
    # sum over steps plus the initial entry covers every cell of the k^p cube
    assert 1 + w.sum() == 4**3


def test_binary_entropy():
    assert binary_entropy(0.5) == 1.0
    assert binary_entropy(0.0) == binary_entropy(1.0) == 0.0
    with pytest.raises(InvalidParam):
        binary_entropy(1.5)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.51, 0.98),
    st.floats(0.0, 1.0),
    st.integers(20, 10**5),
    st.floats(0.01, 0.5),
    st.integers(1, 300),
    st.floats(0.01, 1 / math.sqrt(2)),
)
def test_psi_nonnegative_below_one_over_sqrt_m(nu1, frac, n, kfrac, p, gamma):
    nu2 = nu1 + (0.999 - nu1) * max(frac, 1e-3)
    k = max(1, min(n - 1, int(kfrac * n)))
    assert ogp_exponent_psi(ProblemParams(n, k, p), 2, gamma, nu1, nu2) >= 0


def test_psi_entropy_terms_vanish_as_nu1_to_one():
    params = ProblemParams(1000, 100, 50)
    a = ogp_exponent_psi(params, 2, 0.9, 0.999999, 0.9999999)
    assert a == pytest.approx(1 - 2 * 0.81 / (1 + 4 * 50 * 0.9999999**50), abs=1e-3)


def test_psi_sign_flip_location():
    # with nu2 = 0.99 the penalty 4p nu2^p stays large until p is in the hundreds
    params = lambda p: ProblemParams(1000, 100, p)
    assert ogp_exponent_psi(params(1000), 2, 0.9, 0.97, 0.99) < 0
    assert ogp_exponent_psi(params(200), 2, 0.9, 0.97, 0.99) > 0


def test_psi_domain():
    with pytest.raises(InvalidParam):
        ogp_exponent_psi(ProblemParams(100, 10, 5), 2, 0.9, 0.4, 0.9)


@pytest.mark.parametrize("n,k", [(10**5, 2), (10**6, 300), (4097, 341), (10**9, 1000)])
def test_log_binomial_accurate_on_both_paths(n, k):
    assert log_binomial(n, k) == pytest.approx(float(mp.log(mp.binomial(n, k))), rel=1e-12)
