import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import special

from bddf import specfun

mp.mp.dps = 30

re_part = st.floats(-60, 60, allow_nan=False)
im_part = st.floats(-60, 60, allow_nan=False)


def _away_from_poles(x, y):
    return abs(y) > 1e-3 or x > 0.05 or abs(x - round(x)) > 1e-3


@given(re_part, im_part)
def test_log_gamma_matches_mpmath(x, y):
    if not _away_from_poles(x, y):
        return
    z = complex(x, y)
    ref = complex(mp.loggamma(mp.mpc(x, y)))
    got = specfun.log_gamma(z)
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


@given(re_part, im_part)
def test_digamma_matches_mpmath(x, y):
    if not _away_from_poles(x, y):
        return
    z = complex(x, y)
    ref = complex(mp.digamma(mp.mpc(x, y)))
    assert abs(specfun.digamma(z) - ref) <= 1e-12 * max(1.0, abs(ref))


def test_log_gamma_is_continuous_along_vertical_line():
    t = np.linspace(0.0, 200.0, 20001)
    vals = specfun.log_gamma(0.5 + 1j * t)
    assert np.max(np.abs(np.diff(vals.imag))) < 0.1


def test_log_gamma_real_axis_and_vectorised():
    x = np.array([0.5, 1.0, 2.0, 10.5])
    np.testing.assert_allclose(specfun.log_gamma(x).real, special.gammaln(x), rtol=1e-14, atol=1e-14)
    assert specfun.log_gamma(1.0) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("z", [0.0, -1.0, -7.0])
def test_poles_raise(z):
    with pytest.raises(specfun.PoleError):
        specfun.log_gamma(z)
    with pytest.raises(specfun.PoleError):
        specfun.digamma(z)


def test_digamma_known_values():
    assert specfun.digamma(1.0).real == pytest.approx(-0.5772156649015329, abs=1e-15)
    # psi(1/2) = -gamma - 2 log 2
    assert specfun.digamma(0.5).real == pytest.approx(-0.5772156649015329 - 2 * math.log(2), abs=1e-14)


@pytest.mark.parametrize("nu", [0.5, 1.0, 2.0, 3.0, 10.0])
@pytest.mark.parametrize("t", [1e-6, 0.01, 1.0, 7.5, 50.0, 400.0, 5000.0])
def test_bessel_ratio_matches_mpmath(nu, t):
    ref = float(mp.besseli(nu, t) / mp.besseli(nu - 1, t))
    assert specfun.bessel_i_ratio_up(nu, t) == pytest.approx(ref, rel=1e-13)
    assert specfun.bessel_i_ratio(nu, t) == pytest.approx(1.0 / ref, rel=1e-13)


def test_bessel_ratio_vectorised_and_domain():
    t = np.array([0.1, 1.0, 10.0])
    out = specfun.bessel_i_ratio_up(2.0, t)
    assert out.shape == (3,)
    with pytest.raises(specfun.DomainError):
        specfun.bessel_i_ratio_up(0.0, 1.0)
    with pytest.raises(specfun.DomainError):
        specfun.bessel_i_ratio(1.0, 0.0)


@pytest.mark.parametrize("z", [0.5 + 0.5j, 3.0 - 2.0j, 20.0 + 15.0j])
def test_bessel_i_k_complex(z):
    for nu in (0.0, 1.5, 3.0):
        assert specfun.bessel_i(nu, z) == pytest.approx(complex(mp.besseli(nu, z)), rel=1e-12)
        assert specfun.bessel_k(nu, z) == pytest.approx(complex(mp.besselk(nu, z)), rel=1e-12)
        scaled = specfun.bessel_k(nu, z, scaled=True)
        assert scaled == pytest.approx(complex(mp.besselk(nu, z) * mp.exp(z)), rel=1e-12)


def test_bessel_k_domain_and_overflow():
    with pytest.raises(specfun.DomainError):
        specfun.bessel_k(1.0, -1.0 + 0j)
    with pytest.raises(OverflowError):
        specfun.bessel_i(0.0, 1000.0)
    assert math.isfinite(specfun.bessel_i(0.0, 1000.0, scaled=True))


@pytest.mark.parametrize("nu", [0.0, 0.5, 2.0, 5.5])
def test_bessel_j_zero_matches_mpmath(nu):
    ks = [1, 2, 3, 10, 57]
    got = specfun.bessel_j_zero(nu, np.array(ks))
    for k, g in zip(ks, got):
        assert g == pytest.approx(float(mp.besseljzero(nu, k)), rel=1e-13)


def test_bessel_j_zero_many_terms_match_scipy():
    got = specfun.bessel_j_zero(2.0, np.arange(1, 2001))
    ref = special.jn_zeros(2, 2000)
    np.testing.assert_allclose(got, ref, rtol=1e-12)
    assert np.all(np.diff(got) > 0)


def test_bessel_j_zero_rejects_bad_index():
    with pytest.raises(specfun.DomainError):
        specfun.bessel_j_zero(1.0, 0)
    with pytest.raises(specfun.DomainError):
        specfun.bessel_j_zero(-1.0, 1)


@given(st.floats(0.1, 30), st.floats(0, 60))
def test_regularized_gamma_p_matches_mpmath(a, x):
    ref = float(mp.gammainc(a, 0, x, regularized=True))
    assert specfun.regularized_gamma_p(a, x) == pytest.approx(ref, abs=1e-13)


def test_regularized_gamma_p_domain():
    with pytest.raises(specfun.DomainError):
        specfun.regularized_gamma_p(0.0, 1.0)
    with pytest.raises(specfun.DomainError):
        specfun.regularized_gamma_p(1.0, -1.0)
