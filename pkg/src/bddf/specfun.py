"""Special functions used by the distribution catalog.

Log-gamma and digamma are evaluated by upward recurrence into the
Stirling region; modified Bessel functions of complex argument are
delegated to the AMOS routines shipped with :mod:`scipy.special`.
Bessel-I ratios use a backward recurrence that never forms ``I_nu``
itself, so they stay finite where ``I_nu`` overflows.

All functions accept scalars or numpy arrays and return numpy values.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

__all__ = [
    "SpecialFunctionError",
    "PoleError",
    "DomainError",
    "ConvergenceError",
    "log_gamma",
    "digamma",
    "bessel_i",
    "bessel_k",
    "bessel_i_ratio",
    "bessel_i_ratio_up",
    "bessel_j_zero",
    "regularized_gamma_p",
]


class SpecialFunctionError(ArithmeticError):
    """Base class for failures in this module."""


class PoleError(SpecialFunctionError, ValueError):
    pass


class DomainError(SpecialFunctionError, ValueError):
    pass


class ConvergenceError(SpecialFunctionError, RuntimeError):
    pass


# Bernoulli numbers B_2 .. B_16
_B2K = np.array(
    [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ]
)
_LOG_2PI_HALF = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
# Stirling series is used once Re z reaches this value.
_ASYMPTOTIC_RE = 15.0
# Below this the shift count gets large; reflect instead.
_REFLECT_RE = -20.0


def _unwrap_scalar(x, scalar):
    return x[0] if scalar else x


def _check_poles(z):
    bad = (z.imag == 0.0) & (z.real <= 0.0) & (z.real == np.floor(z.real))
    if np.any(bad):
        raise PoleError(f"pole at non-positive integer {z[bad].real[0]:g}")


def _shift_count(z):
    return np.maximum(0, np.ceil(_ASYMPTOTIC_RE - z.real)).astype(int)


def _log_gamma_stirling(z):
    out = (z - 0.5) * np.log(z) - z + _LOG_2PI_HALF
    zinv = 1.0 / z
    zinv2 = zinv * zinv
    term = zinv
    for k, b in enumerate(_B2K, start=1):
        out = out + b / ((2 * k) * (2 * k - 1)) * term
        term = term * zinv2
    return out


def _log_gamma_recurrence(z):
    n = _shift_count(z)
    acc = np.zeros_like(z)
    for k in range(int(n.max(initial=0))):
        m = k < n
        acc = acc + np.where(m, np.log(np.where(m, z + k, 1.0)), 0.0)
    return _log_gamma_stirling(z + n) - acc


def log_gamma(z):
    """Log-gamma on the standard branch (cut along the negative real axis).

    The branch is the analytic continuation of the real ``log Gamma(x)``,
    ``x > 0``, so ``log_gamma(a + i t)`` is continuous in ``t``.
    """
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_poles(z)
    out = np.empty_like(z)
    refl = z.real < _REFLECT_RE
    direct = ~refl
    if np.any(direct):
        out[direct] = _log_gamma_recurrence(z[direct])
    if np.any(refl):
        zr = z[refl]
        r = _LOG_PI - np.log(np.sin(np.pi * zr)) - _log_gamma_recurrence(1.0 - zr)
        # choose the sheet that continues the recurrence branch
        r = r + 2j * np.pi * np.copysign(1.0, zr.imag) * np.floor(0.5 * zr.real + 0.25)
        out[refl] = r
    return _unwrap_scalar(out, scalar)


def _digamma_asymptotic(z):
    zinv = 1.0 / z
    zinv2 = zinv * zinv
    out = np.log(z) - 0.5 * zinv
    term = zinv2
    for k, b in enumerate(_B2K, start=1):
        out = out - b / (2 * k) * term
        term = term * zinv2
    return out


def _digamma_recurrence(z):
    n = _shift_count(z)
    acc = np.zeros_like(z)
    for k in range(int(n.max(initial=0))):
        m = k < n
        acc = acc + np.where(m, 1.0 / np.where(m, z + k, 1.0), 0.0)
    return _digamma_asymptotic(z + n) - acc


def digamma(z):
    """Digamma ``psi(z) = d/dz log Gamma(z)`` for complex ``z``."""
    scalar = np.ndim(z) == 0
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_poles(z)
    out = np.empty_like(z)
    refl = z.real < _REFLECT_RE
    direct = ~refl
    if np.any(direct):
        out[direct] = _digamma_recurrence(z[direct])
    if np.any(refl):
        zr = z[refl]
        out[refl] = _digamma_recurrence(1.0 - zr) - np.pi / np.tan(np.pi * zr)
    return _unwrap_scalar(out, scalar)


def _finite_or_raise(val, what):
    if not np.all(np.isfinite(val)):
        raise OverflowError(f"{what} is not finite; use scaled=True")
    return val


def bessel_i(nu, z, scaled=False):
    """Modified Bessel function of the first kind ``I_nu(z)``.

    With ``scaled=True`` returns ``exp(-|Re z|) * I_nu(z)``, which stays
    finite for large arguments.
    """
    if nu < -1:
        raise DomainError(f"order nu={nu} < -1 not supported")
    z = np.asarray(z)
    val = _sp.ive(nu, z) if scaled else _sp.iv(nu, z)
    if np.iscomplexobj(z):
        val = np.asarray(val, dtype=complex)
    return _finite_or_raise(val, f"I_{nu}")


def bessel_k(nu, z, scaled=False):
    """Modified Bessel function of the second kind ``K_nu(z)``, ``Re z > 0``.

    With ``scaled=True`` returns ``exp(z) * K_nu(z)``.
    """
    z = np.asarray(z)
    if np.any(np.real(z) <= 0.0):
        raise DomainError("K_nu requires Re z > 0")
    val = _sp.kve(nu, z) if scaled else _sp.kv(nu, z)
    if np.iscomplexobj(z):
        val = np.asarray(val, dtype=complex)
    return _finite_or_raise(val, f"K_{nu}")


def bessel_i_ratio_up(nu, t):
    """``I_{nu}(t) / I_{nu-1}(t)`` for ``nu > 0``, ``t >= 0``.

    Backward recurrence ``r_k = t / (2k + t r_{k+1})`` started from an
    Amos-type estimate far enough above ``nu`` that the starting error is
    damped below double precision.
    """
    if nu <= 0:
        raise DomainError(f"nu={nu} must be positive")
    scalar = np.ndim(t) == 0
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise DomainError("t must be non-negative")
    tmax = float(t.max(initial=0.0))
    n_steps = int(math.ceil(6.0 * math.sqrt(tmax))) + 40
    k = nu + n_steps
    r = t / (k - 0.5 + np.sqrt((k + 0.5) ** 2 + t * t))
    for j in range(n_steps, -1, -1):
        r = t / (2.0 * (nu + j) + t * r)
    return _unwrap_scalar(r, scalar)


def bessel_i_ratio(nu, t):
    """``I_{nu-1}(t) / I_nu(t)`` for ``nu > 0``, ``t > 0``."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    return 1.0 / bessel_i_ratio_up(nu, t)


def _mcmahon(nu, k):
    beta = (k + 0.5 * nu - 0.25) * math.pi
    mu = 4.0 * nu * nu
    b8 = 8.0 * beta
    return (
        beta
        - (mu - 1.0) / b8
        - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8**3)
        - 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * b8**5)
    )


def bessel_j_zero(nu, k, max_iter=50):
    """k-th positive zero of ``J_nu``; ``k`` may be an int or an array of ints.

    McMahon's expansion gives the starting point; Newton's method on
    ``J_nu`` refines it.
    """
    if nu < 0:
        raise DomainError("nu must be non-negative")
    scalar = np.ndim(k) == 0
    k = np.atleast_1d(np.asarray(k))
    if np.any(k < 1) or np.any(k != np.floor(k)):
        raise DomainError("k must be a positive integer")
    guess = _mcmahon(nu, k.astype(float))
    x = guess.copy()
    for _ in range(max_iter):
        f = _sp.jv(nu, x)
        fp = 0.5 * (_sp.jv(nu - 1.0, x) - _sp.jv(nu + 1.0, x))
        step = f / fp
        x = x - step
        if np.all(np.abs(step) <= 1e-14 * np.maximum(1.0, np.abs(x))):
            break
    else:
        raise ConvergenceError(f"Newton did not converge for J_{nu} zeros")
    if np.any(np.abs(x - guess) > 0.5 * math.pi):
        raise ConvergenceError(f"Newton left the McMahon bracket for J_{nu}")
    return _unwrap_scalar(x, scalar)


def regularized_gamma_p(shape, x):
    """Lower regularized incomplete gamma ``P(shape, x)``."""
    if shape <= 0:
        raise DomainError("shape must be positive")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("x must be non-negative")
    out = _sp.gammainc(shape, x)
    return out[()] if out.ndim == 0 else out
