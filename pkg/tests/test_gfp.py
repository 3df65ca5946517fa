import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate, special

from heavytail import dist, gfp
from heavytail.dist import DomainError, TailBalancedLaw
from heavytail.gfp import CoeffSeries, FarimaSpec


def test_binomial_examples():
    np.testing.assert_array_equal(gfp.binomial_coeffs(2, 4).g, [1, 2, 3, 4, 5])
    np.testing.assert_allclose(gfp.binomial_coeffs(0.5, 3).g, [1, 0.5, 0.375, 0.3125], rtol=1e-15)
    np.testing.assert_allclose(gfp.binomial_coeffs(1.5, 3).g, [1, 1.5, 1.875, 2.1875], rtol=1e-15)
    with pytest.raises(DomainError):
        gfp.binomial_coeffs(-1.0, 3)


@pytest.mark.parametrize("d", [0.3, 0.5, 1.3, 1.7, 2.5])
def test_binomial_against_gamma_ratio(d):
    g = gfp.binomial_coeffs(d, 2000).g
    k = np.arange(2001)
    ref = np.exp(special.gammaln(k + d) - special.gammaln(k + 1) - special.gammaln(d))
    np.testing.assert_allclose(g, ref, rtol=1e-10)


def test_binomial_log_space_fallback():
    g = gfp.binomial_coeffs(150.5, 400).g
    assert np.all(np.isfinite(g))
    ref = special.gammaln(400 + 150.5) - special.gammaln(401) - special.gammaln(150.5)
    assert math.log(g[-1]) == pytest.approx(ref, rel=1e-12)


def test_farima_reduces_to_binomial():
    np.testing.assert_array_equal(gfp.farima_coeffs(FarimaSpec(1.5), 100).g,
                                  gfp.binomial_coeffs(1.5, 100).g)


def test_farima_convolution_by_hand():
    g = gfp.farima_coeffs(FarimaSpec(1.5, (1.0, 0.5)), 5).g
    b = gfp.binomial_coeffs(1.5, 5).g
    assert g[2] == pytest.approx(2.625)
    np.testing.assert_allclose(g[1:], b[1:] + 0.5 * b[:-1])


def test_series_division_consistency():
    spec = FarimaSpec(1.7, (1.0, 0.5), (1.0, -0.2, 0.05))
    g = gfp.farima_coeffs(spec, 500).g
    target = np.convolve(gfp.binomial_coeffs(1.7, 500).g, spec.theta)[:501]
    back = np.convolve(g, spec.phi)[:501]
    np.testing.assert_allclose(back, target, rtol=1e-12, atol=1e-12)


def test_farima_normalized_limit():
    spec = FarimaSpec(1.5, (1.0, 0.5), (1.0, -0.2))
    n = 10_000
    g = gfp.farima_coeffs(spec, n).g
    ratio = g[n] * spec.phi_at_one * special.gamma(spec.gamma) / (spec.theta_at_one * n ** (spec.gamma - 1))
    assert abs(ratio - 1) < 0.02


def test_phi_root_validation():
    with pytest.raises(DomainError):
        FarimaSpec(1.5, (1.0,), (1.0, -1.0))
    with pytest.raises(DomainError):
        FarimaSpec(1.5, (1.0,), (1.0, -2.0))
    with pytest.raises(DomainError):
        FarimaSpec(1.5, (1.0, -1.0))
    FarimaSpec(1.5, (1.0,), (1.0, -0.99))
    spec = FarimaSpec.from_dict({"gamma": 1.2, "theta": [1, 0.5], "phi": [1, -0.2]})
    assert FarimaSpec.from_dict(spec.to_dict()) == spec


def test_partial_sums():
    c = gfp.binomial_coeffs(2, 10)
    assert gfp.partial_sums(c, 0) == 0
    assert gfp.partial_sums(c, 3) == 6
    assert gfp.partial_sums(c, 2.5) == 6
    assert gfp.partial_sums(c, 11) == sum(range(1, 12))
    with pytest.raises(IndexError):
        gfp.partial_sums(c, 12)
    with pytest.raises(DomainError):
        gfp.partial_sums(c, -1)


@pytest.mark.parametrize("gamma", [1.3, 1.7])
def test_regular_variation_of_coefficients_and_sums(gamma):
    spec = FarimaSpec(gamma)
    n = 10_000
    xs = np.linspace(0.1, 2.0, 39)
    c = gfp.farima_coeffs(spec, 2 * n + 2)
    scale = gfp.transfer_value(spec, 1 - 1 / n)
    assert scale == pytest.approx(n ** gamma)
    point = c.g[np.floor(n * xs + 1e-9).astype(int)] * special.gamma(gamma) * n / (xs ** (gamma - 1) * scale)
    cum = gfp.partial_sums(c, n * xs) * special.gamma(1 + gamma) / (xs ** gamma * scale)
    assert np.all(np.abs(point - 1) < 0.02)
    assert np.all(np.abs(cum - 1) < 0.02)


@given(st.floats(1.01, 4.0))
def test_q_and_Q_invariants(d):
    o = gfp.expansion_oracle(FarimaSpec(d), d, 2)
    assert o.q_coeffs[0] == 1.0 and o.Q_coeffs[0] == 1.0
    assert o.q_coeffs[1] == pytest.approx(d / 2)
    assert o.Q_coeffs[1] == pytest.approx(d * (d - 1) / 2)
    # generalized Bernoulli closed form for the second coefficient
    assert o.Q_coeffs[2] == pytest.approx((d - 1) * (d - 2) * d * (3 * d - 1) / 24, abs=1e-14)


def test_expansion_oracle_examples():
    o = gfp.expansion_oracle(FarimaSpec(1.5), 1.5, 1)
    assert o.Q_coeffs[1] == pytest.approx(0.375)
    o = gfp.expansion_oracle(FarimaSpec(1.5, (1.0, 0.5)), 1.5, 1)
    assert o.P_coeffs == pytest.approx((1.5, 0.3125))
    assert o.A_moments == pytest.approx((1.5, 0.5))
    with pytest.raises(gfp.UnsupportedOrder):
        gfp.expansion_oracle(FarimaSpec(1.5), 1.5, 3)
    with pytest.raises(DomainError):
        gfp.expansion_oracle(FarimaSpec(0.5), 0.5, 1)


def test_rational_a_moments():
    # A = 1/(1 - 0.2x): A_k = 0.2^k, sum k A_k = 0.2/0.64
    o = gfp.expansion_oracle(FarimaSpec(1.5, (1.0,), (1.0, -0.2)), 1.5, 2)
    assert o.A_moments[0] == pytest.approx(1.25, rel=1e-14)
    assert o.A_moments[1] == pytest.approx(0.2 / 0.64, rel=1e-13)
    assert o.A_moments[2] == pytest.approx(0.2 * 1.2 / 0.8 ** 3, rel=1e-13)


def test_gamma_ratio_examples():
    exact, approx = gfp.gamma_ratio_check(1.5, 1, 100)
    assert approx == pytest.approx(10.0375, abs=1e-12)
    assert abs(exact - approx) < 1e-3
    for k in (1, 5, 100, 12345):
        e, a = gfp.gamma_ratio_check(2.0, 1, k)
        assert e == a == k + 1


@pytest.mark.parametrize("d", [1.3, 1.5, 1.7])
def test_gamma_ratio_against_mpmath(d):
    mpmath.mp.dps = 40
    for k in (10, 1000, 10 ** 5):
        exact, _ = gfp.gamma_ratio_check(d, 1, k)
        ref = mpmath.gamma(k + mpmath.mpf(d)) / mpmath.gamma(k + 1)
        assert exact == pytest.approx(float(ref), rel=1e-14)


def test_gamma_ratio_error_decay():
    d = 1.5
    e1 = abs(np.subtract(*gfp.gamma_ratio_check(d, 1, 100)))
    e2 = abs(np.subtract(*gfp.gamma_ratio_check(d, 1, 1000)))
    assert e2 < e1 * 10 ** (d - 2) * 1.5
    # second order improves on first order
    f2 = abs(np.subtract(*gfp.gamma_ratio_check(d, 2, 1000)))
    assert f2 < e2 / 100


def test_expansion_residual_exact_case():
    e = gfp.expansion_residual(FarimaSpec(2.0), None, 1, np.arange(1, 3000))
    assert np.all(e == 0.0)


@pytest.mark.parametrize("spec", [FarimaSpec(1.5, (1.0, 0.5)), FarimaSpec(1.3),
                                  FarimaSpec(1.7, (1.0, 0.5), (1.0, -0.2)), FarimaSpec(2.5)])
def test_expansion_residual_decreases(spec):
    ns = np.array([256, 512, 1024, 2048, 4096])
    e = np.abs(gfp.expansion_residual(spec, None, 1, ns))
    assert np.all(np.diff(e) < 0)
    e2 = np.abs(gfp.expansion_residual(spec, None, 2, ns[:3]))
    assert np.all(np.diff(e2) < 0)


def test_expansion_residual_horizon():
    c = gfp.farima_coeffs(FarimaSpec(1.5), 10)
    with pytest.raises(IndexError):
        gfp.expansion_residual(FarimaSpec(1.5), None, 1, 20, coeffs=c)


def test_nrv_defect_binomial_closed_form():
    gam = 1.5
    d = gfp.nrv_defect(gfp.binomial_coeffs(gam, 1000), gam)
    n = np.arange(1, 1000)
    np.testing.assert_allclose(d, n * (gam - 1) / (n + 1) - (gam - 1), atol=1e-10)


def test_nrv_defect_farima_small():
    c = gfp.farima_coeffs(FarimaSpec(1.5, (1.0, 0.5), (1.0, -0.2)), 10_001)
    d = gfp.nrv_defect(c, 1.5)
    assert abs(d[10_000 - 1]) < 1e-2


def test_nrv_defect_marks_zeros():
    d = gfp.nrv_defect(CoeffSeries([1.0, -1.0, 0.0, 1.0, -1.0, 0.0, 2.0]), 1.5)
    assert np.isnan(d[1]) and np.isnan(d[4])
    assert np.all(np.isfinite(d[[0, 2, 3]]))


def test_increment_sup():
    c = gfp.binomial_coeffs(1.5, 4096)
    assert gfp.increment_sup(c, 0) == 0.0
    one = gfp.increment_sup(c, 1)
    for r in (2, 7, 50, 400):
        assert gfp.increment_sup(c, r) <= r * one + 1e-12
    with pytest.raises(DomainError):
        gfp.increment_sup(c, 5000)


def test_increment_sup_power_bound():
    n = 4096
    c = gfp.binomial_coeffs(1.5, n)
    deltas = np.geomspace(1 / n, 0.9, 25)
    r = np.maximum(np.floor(n * deltas).astype(int), 1)
    vals = np.array([n / gfp.partial_sums(c, n) * gfp.increment_sup(c, int(k)) for k in r])
    # a power bound with exponent below gamma - 1 holds with a moderate constant
    for theta in (0.3, 0.45):
        assert np.max(vals / deltas ** theta) < 1.5
    slope = np.polyfit(np.log(deltas), np.log(vals), 1)[0]
    assert 0.45 < slope < 0.7


@given(st.lists(st.floats(-3, 3), min_size=3, max_size=30), st.integers(1, 5))
@settings(max_examples=30)
def test_increment_sup_subadditive(values, r):
    c = CoeffSeries(values)
    r = min(r, c.horizon)
    assert gfp.increment_sup(c, r) <= r * gfp.increment_sup(c, 1) + 1e-9


def test_centering_sequence_symmetric_zero():
    c = gfp.centering_sequence(TailBalancedLaw(1.5, 0.5), gfp.binomial_coeffs(1.5, 100), 100)
    np.testing.assert_allclose(c, 0.0, atol=1e-10)


def test_centering_sequence_quadrature_oracle():
    law = TailBalancedLaw(1.5, 1.0)
    coeffs = gfp.binomial_coeffs(1.5, 100)
    lo, hi = float(dist.quantile(law, 0.01)), float(dist.quantile(law, 0.99))
    ref, _ = integrate.quad(lambda x: 1.5 * x ** -1.5, lo, hi, epsrel=1e-13)
    c = gfp.centering_sequence(law, coeffs, 100)
    np.testing.assert_allclose(c, gfp.partial_sums(coeffs, np.arange(101)) * ref, rtol=1e-10)


@pytest.mark.parametrize("alpha,p", [(1.5, 0.7), (0.8, 0.9), (1.0, 0.8), (1.5, 0.5)])
def test_centering_adjust_limit(alpha, p):
    law = TailBalancedLaw(alpha, p)
    n, M, k = 100_000, 4, 50
    coeffs = gfp.binomial_coeffs(1.5, M * n)
    diff = gfp.centering_sequence(law, coeffs, M * n)[k] - gfp.centering_sequence(law, coeffs, n)[k]
    scaled = diff * n / (gfp.partial_sums(coeffs, k) * float(dist.star_quantile(law, 1 - 1 / n)))
    q = 1 - p
    if alpha == 1.0:
        h = (p - q) * math.log(M)
    else:
        h = alpha / (alpha - 1) * (p ** (1 / alpha) - q ** (1 / alpha)) * (1 - M ** (1 / alpha - 1))
    if h == 0.0:
        assert abs(scaled) < 1e-9
    else:
        assert abs(scaled / h - 1) < 0.03


def test_coefficient_kernel():
    c = gfp.binomial_coeffs(1.5, 8)
    k = gfp.coefficient_kernel(c, 8)
    np.testing.assert_array_equal(k.values, c.g)
    kn = gfp.coefficient_kernel(c, 8, normalize=True)
    np.testing.assert_allclose(kn.values, 8 * c.g / gfp.partial_sums(c, 8))
    with pytest.raises(IndexError):
        gfp.coefficient_kernel(c, 9)
