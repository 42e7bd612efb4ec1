import cmath
import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bddf import catalog
from bddf.catalog import FamilyId, ValidationError, bdcf_exponent, log_cf, make_family
from bddf.checks import derivative_gap, integral_gap

FAMILIES = [
    ("gamma", {"alpha": 2, "lambda": 1}),
    ("chi-square", {"n": 2}),
    ("log-gamma", {"alpha": 2, "lambda": 1}),
    ("inverse-gamma", {"alpha": 2, "lambda": 2}),
    ("hyperbolic-cosine", {}),
    ("hyperbolic-sine", {}),
    ("hyperbolic-tangent", {}),
    ("bessel-zero-series", {"nu": 2}),
    ("student-t", {"nu": 2}),
    ("stochastic-area", {}),
    ("generalized-stochastic-area", {"nu": 2}),
    ("inverse-gaussian", {"lambda": 1, "mu": 1}),
    ("quadratic-bm", {"a": 1, "b": 2}),
    ("logistic", {"a": 0.3, "b": 1}),
    ("noncentral-chi-square", {"k": 2, "c": 1}),
    ("bessel-h", {"nu": 10}),
    ("fisher-z", {"alpha1": 1, "alpha2": 2}),
]
IDS = [f for f, _ in FAMILIES]
SYMMETRIC = {
    "hyperbolic-cosine",
    "hyperbolic-sine",
    "hyperbolic-tangent",
    "bessel-zero-series",
    "student-t",
    "stochastic-area",
    "generalized-stochastic-area",
}


def desc_of(name):
    return make_family(name, dict(FAMILIES)[name])


def test_registry_covers_every_family():
    assert sorted(catalog.family_names()) == sorted(IDS)
    assert len(FamilyId) == 17


def test_make_family_examples():
    g = make_family("gamma", alpha=2, lam=1)
    assert not g.symmetric
    assert g.atom_mass_at_zero == pytest.approx(math.exp(-2))
    t = make_family(FamilyId.STUDENT_T, {"nu": 2})
    assert t.symmetric and t.atom_mass_at_zero is None
    assert make_family("chi-square", n=3).atom_mass_at_zero == pytest.approx(math.exp(-1.5))


@pytest.mark.parametrize(
    "family, params",
    [
        ("gamma", {"alpha": -1, "lambda": 1}),
        ("gamma", {"alpha": 1}),
        ("gamma", {"alpha": 1, "lambda": 1, "beta": 2}),
        ("gamma", {"alpha": "x", "lambda": 1}),
        ("gamma", {"alpha": math.inf, "lambda": 1}),
        ("logistic", {"a": 0, "b": 0}),
        ("bessel-h", {"nu": 0}),
        ("no-such-family", {}),
    ],
)
def test_validation_errors(family, params):
    with pytest.raises(ValidationError):
        make_family(family, params)


def test_descriptor_is_immutable():
    g = make_family("gamma", alpha=2, lam=1)
    with pytest.raises(Exception):
        g.params["alpha"] = 3
    with pytest.raises(Exception):
        g.symmetric = True


def test_symmetry_flags():
    for name in IDS:
        assert desc_of(name).symmetric == (name in SYMMETRIC), name


def test_log_cf_examples():
    g = make_family("gamma", alpha=2, lam=1)
    assert log_cf(g, 1.0) == pytest.approx(complex(-math.log(2), math.pi / 2), abs=1e-14)
    lg = make_family("logistic", a=0, b=1)
    s = math.sqrt(3)
    assert log_cf(lg, 1.0) == pytest.approx(math.log(s / math.sinh(s)), abs=1e-14)


def test_exponent_examples():
    assert bdcf_exponent(make_family("hyperbolic-cosine"), 1.0) == pytest.approx(-math.tanh(1.0), abs=1e-15)
    assert bdcf_exponent(make_family("gamma", alpha=2, lam=1), 1.0) == pytest.approx(-1 + 1j, abs=1e-15)
    assert bdcf_exponent(make_family("student-t", nu=0.5), 1.0) == pytest.approx(-1.0, abs=1e-13)


@pytest.mark.parametrize("name", IDS)
def test_zero_and_conjugate_symmetry(name):
    d = desc_of(name)
    assert log_cf(d, 0.0) == 0
    assert bdcf_exponent(d, 0.0) == 0
    t = np.array([0.03, 0.7, 3.0, 12.0])
    np.testing.assert_allclose(bdcf_exponent(d, -t), np.conj(bdcf_exponent(d, t)), rtol=0, atol=1e-14)
    np.testing.assert_allclose(log_cf(d, -t), np.conj(log_cf(d, t)), rtol=0, atol=1e-14)


@pytest.mark.parametrize("name", IDS)
def test_derivative_consistency(name):
    d = desc_of(name)
    for t in (0.1, 0.5, 1.0, 2.0, 5.0, 10.0):
        assert derivative_gap(d, t) <= 1e-6


@pytest.mark.parametrize("name", IDS)
def test_exponent_integrates_to_log_cf(name):
    d = desc_of(name)
    for t in (0.5, 1.0, 3.0):
        assert integral_gap(d, t) <= 1e-6


@pytest.mark.parametrize("name", sorted(SYMMETRIC))
def test_symmetric_exponents_are_real(name):
    t = np.linspace(1e-3, 20.0, 400)
    eta = bdcf_exponent(desc_of(name), t)
    assert np.all(np.abs(eta.imag) <= 1e-12 * (1 + np.abs(eta)))


def test_sinh_tanh_cosh_identity():
    t = np.linspace(1e-4, 30.0, 5000)
    lhs = bdcf_exponent(make_family("hyperbolic-sine"), t) + bdcf_exponent(make_family("hyperbolic-tangent"), t)
    assert np.max(np.abs(lhs - bdcf_exponent(make_family("hyperbolic-cosine"), t))) <= 1e-12


def test_area_equals_generalized_area_at_half():
    t = np.linspace(1e-3, 10.0, 2000)
    a = bdcf_exponent(make_family("stochastic-area"), t)
    b = bdcf_exponent(make_family("generalized-stochastic-area", nu=0.5), t)
    assert np.max(np.abs(a - b) / np.abs(a)) <= 1e-9


@pytest.mark.parametrize(
    "name, atom",
    [
        ("gamma", math.exp(-2)),
        ("chi-square", math.exp(-1)),
        ("hyperbolic-tangent", math.exp(-1)),
        ("noncentral-chi-square", math.exp(-1)),
        ("bessel-h", math.exp(-10)),
    ],
)
def test_atom_is_limit_of_exponent(name, atom):
    d = desc_of(name)
    assert d.atom_mass_at_zero == pytest.approx(atom)
    assert abs(bdcf_exponent(d, 1e3).real - math.log(atom)) <= 1e-3


@pytest.mark.parametrize("name", [n for n in IDS if n not in {"gamma", "chi-square", "hyperbolic-tangent",
                                                              "noncentral-chi-square", "bessel-h"}])
def test_families_without_atom(name):
    assert desc_of(name).atom_mass_at_zero is None


def test_bessel_h_is_a_characteristic_function():
    d = make_family("bessel-h", nu=10)
    t = np.linspace(-20.0, 20.0, 4001)
    assert np.all(np.abs(np.exp(log_cf(d, t))) <= 1.0 + 1e-12)
    eta = bdcf_exponent(d, t[t > 0])
    assert np.max(np.abs(np.diff(eta))) < 0.5  # no branch jumps


def test_inverse_gaussian_uses_divided_root():
    # the multiplied-root reading is not a characteristic exponent: |exp| > 1
    d = make_family("inverse-gaussian", lam=1, mu=1)
    t = 3.0
    divided = 1j * t / cmath.sqrt(1 - 2j * t)
    multiplied = 1j * t * cmath.sqrt(1 - 2j * t)
    assert bdcf_exponent(d, t) == pytest.approx(divided, abs=1e-14)
    assert multiplied.real > 0
    assert bdcf_exponent(d, t).real < 0


@given(st.floats(1e-3, 50.0))
def test_log_gamma_family_matches_mpmath(t):
    d = make_family("log-gamma", alpha=2, lam=1.5)
    ref = complex(mp.loggamma(mp.mpc(2, t)) - mp.loggamma(2) - 1j * t * mp.log(1.5))
    assert abs(log_cf(d, t) - ref) <= 1e-11 * max(1, abs(ref))


@given(st.floats(1e-3, 40.0))
def test_inverse_gamma_matches_mpmath(t):
    d = make_family("inverse-gamma", alpha=2, lam=2)
    z = 2 * mp.sqrt(-2j * mp.mpf(t))
    phi = 2 * (-2j * mp.mpf(t)) ** 1 * mp.besselk(2, z) / mp.gamma(2)
    eta = -mp.sqrt(-2j * mp.mpf(t)) * mp.besselk(1, z) / mp.besselk(2, z)
    assert abs(np.exp(log_cf(d, t)) - complex(phi)) <= 1e-12
    assert abs(bdcf_exponent(d, t) - complex(eta)) <= 1e-10 * max(1, abs(complex(eta)))


@given(st.floats(1e-2, 60.0))
def test_bessel_zero_series_original_form(t):
    # eta = 2 nu - t I_{nu-1}/I_nu
    d = make_family("bessel-zero-series", nu=2)
    ref = float(4 - t * mp.besseli(1, t) / mp.besseli(2, t))
    assert bdcf_exponent(d, t).real == pytest.approx(ref, abs=1e-11 * max(1, abs(ref)))


@given(st.floats(1e-2, 40.0))
def test_generalized_area_original_form(t):
    nu = 2
    d = make_family("generalized-stochastic-area", nu=nu)
    i = [mp.besseli(nu + k, t) for k in (-1, 0, 1, 2)]
    r = i[2] / i[1]
    ref = -2 * t * r - t * t / 2 * (1 + i[3] / i[1] - r * r - i[0] * i[2] / i[1] ** 2)
    assert bdcf_exponent(d, t).real == pytest.approx(float(ref), abs=1e-9 * max(1, abs(float(ref))))


@given(st.floats(1e-3, 30.0))
def test_quadratic_bm_original_form(t):
    a, b = 1.0, 2.0
    d = make_family("quadratic-bm", a=a, b=b)
    ref = -0.5 * math.tanh(t) * ((1 + a * a) * t + b * b / t) + (
        -a * a * t * t + b * b - 2 * a * b * t * math.sinh(t)
    ) / (2 * math.cosh(t) ** 2)
    assert bdcf_exponent(d, t).real == pytest.approx(ref, abs=1e-9 * max(1, abs(ref)))


def test_logistic_location_enters_exponent():
    d = make_family("logistic", a=0.7, b=1)
    t = 2.0
    c = math.sqrt(3)
    assert bdcf_exponent(d, t) == pytest.approx(1j * t * 0.7 + 1 - c * t / math.tanh(c * t), abs=1e-14)


def test_closed_forms():
    half = make_family("student-t", nu=0.5)
    assert catalog.closed_form_bddf(half, 1.0) == pytest.approx(0.75)
    assert catalog.closed_form_bddf(half, 0.0) == 0.5
    g = make_family("gamma", alpha=2, lam=1)
    assert catalog.closed_form_bddf(g, 1.0) == pytest.approx(0.394297, abs=2e-6)
    assert catalog.closed_form_bddf(make_family("hyperbolic-sine"), 1.0) is None
    with pytest.raises(ValueError):
        catalog.closed_form_bddf(g, 0.0)


def _mp_poisson_gamma(alpha, lam, a):
    total = mp.mpf(0)
    for n in range(1, 200):
        total += mp.mpf(alpha) ** n / mp.factorial(n) * mp.gammainc(n, 0, lam * a, regularized=True)
    return float(mp.exp(-alpha) * (1 + total))


@pytest.mark.parametrize("a", [1e-3, 0.5, 2.0, 6.0, 20.0])
def test_compound_poisson_oracle(a):
    g = make_family("gamma", alpha=2, lam=1)
    assert catalog.bddf_compound_poisson_oracle(g, a) == pytest.approx(_mp_poisson_gamma(2, 1, a), abs=1e-12)
    c = make_family("chi-square", n=2)
    assert catalog.bddf_compound_poisson_oracle(c, a) == pytest.approx(_mp_poisson_gamma(1, 0.5, a), abs=1e-12)


def test_compound_poisson_oracle_limits():
    g = make_family("gamma", alpha=2, lam=1)
    assert catalog.bddf_compound_poisson_oracle(g, 1e-12) == pytest.approx(math.exp(-2), abs=1e-10)
    with pytest.raises(ValueError):
        catalog.bddf_compound_poisson_oracle(make_family("hyperbolic-sine"), 1.0)
