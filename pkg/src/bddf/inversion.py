"""Gil-Pelaez inversion of characteristic exponents.

For an exponent ``g`` with ``exp(g)`` a characteristic function,

    F(a) = 1/2 - (1/pi) int_0^inf Im(exp(-i t a + g(t))) dt / t,

and for real even ``g`` the sine form ``1/2 + (1/pi) int exp(g) sin(ta)/t``.

The integral is split at a small cutoff ``t0``. On ``(0, t0]`` Gauss-Legendre
runs in ``u = sqrt(t)``, which absorbs both the removable ``0/0`` and
``sqrt(t)`` cusps. Beyond ``t0`` panels grow geometrically until they
reach half a period of the dominant oscillation, after which they are
aligned to the zeros of ``sin(ta)`` and the partial sums are accelerated
with Wynn's epsilon algorithm.

If the driving law has a point mass ``c`` at zero, ``exp(g(t)) -> c`` and
the tail is only conditionally convergent; when ``c`` is known it is
subtracted and its contribution ``c * sign(a) / 2`` added analytically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import special

from .catalog import FamilyDescriptor

__all__ = [
    "QuadratureConfig",
    "CdfEstimate",
    "invert_cdf",
    "invert_cdf_symmetric",
    "bddf",
    "cdf_of_x",
    "bessel_transform_check",
    "bessel_transform_rhs",
    "wynn_epsilon",
]

_MAX_DEPTH = 12
_GROWTH_PANELS = 400


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 5e-7
    max_half_periods: int = 4000
    acceleration_order: int = 8
    hard_truncation: float | None = None
    small_t_cutoff: float = 1e-4
    panel_rule_order: int = 15

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be positive")
        if not self.small_t_cutoff > 0:
            raise ValueError("small_t_cutoff must be positive")
        if self.hard_truncation is not None and not self.hard_truncation > self.small_t_cutoff:
            raise ValueError("hard_truncation must exceed small_t_cutoff")
        if self.max_half_periods < 1 or self.acceleration_order < 1 or self.panel_rule_order < 2:
            raise ValueError("panel counts and orders must be positive")


@dataclass(frozen=True)
class CdfEstimate:
    value: float
    error_estimate: float
    evaluations: int
    converged: bool
    clipped: bool = False


@lru_cache(maxsize=8)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def wynn_epsilon(seq):
    """Wynn's epsilon extrapolation of a sequence of partial sums.

    Returns ``(limit, error)``, where the error is the distance between the
    two highest-order even-column entries.
    """
    s = [float(v) for v in seq]
    n = len(s)
    if n < 3:
        return s[-1], (abs(s[-1] - s[-2]) if n == 2 else math.inf)
    prev = [0.0] * (n + 1)
    cur = list(s)
    evens = [s[-1]]
    for k in range(1, n):
        nxt = []
        for j in range(len(cur) - 1):
            d = cur[j + 1] - cur[j]
            if d == 0.0:
                # converged column; stop here
                nxt = None
                break
            nxt.append(prev[j + 1] + 1.0 / d)
        if nxt is None or not nxt:
            break
        prev, cur = cur, nxt
        if k % 2 == 0:
            evens.append(cur[-1])
    if len(evens) == 1:
        return evens[0], abs(s[-1] - s[-2])
    return evens[-1], abs(evens[-1] - evens[-2])


class _Integrator:
    """Adaptive Gauss-Legendre panels on a real integrand ``f(t)``."""

    def __init__(self, f: Callable, order: int):
        self.f = f
        self.x, self.w = _gauss_legendre(order)
        self.evaluations = 0

    def _eval(self, t):
        self.evaluations += t.size
        return self.f(t)

    def _rule(self, lo, hi, vals):
        return 0.5 * (hi - lo) * float(np.dot(self.w, vals))

    def _halves(self, lo, hi):
        mid = 0.5 * (lo + hi)
        ta = 0.5 * (lo + mid) + 0.5 * (mid - lo) * self.x
        tb = 0.5 * (mid + hi) + 0.5 * (hi - mid) * self.x
        v = self._eval(np.concatenate([ta, tb]))
        n = self.x.size
        return mid, self._rule(lo, mid, v[:n]), self._rule(mid, hi, v[n:])

    def panel(self, lo, hi, tol):
        whole = self._rule(lo, hi, self._eval(0.5 * (lo + hi) + 0.5 * (hi - lo) * self.x))
        return self._refine(lo, hi, whole, tol, 0)

    def _refine(self, lo, hi, whole, tol, depth):
        mid, left, right = self._halves(lo, hi)
        err = abs(left + right - whole)
        if err <= tol or depth >= _MAX_DEPTH:
            return left + right, err, err <= tol
        ql, el, okl = self._refine(lo, mid, left, 0.5 * tol, depth + 1)
        qr, er, okr = self._refine(mid, hi, right, 0.5 * tol, depth + 1)
        return ql + qr, el + er, okl and okr


@dataclass
class _MarchResult:
    integral: float
    error: float
    evaluations: int
    converged: bool


def _march(f, probe, a, cfg: QuadratureConfig, tol, start=None, stop=None) -> _MarchResult:
    """Integrate ``f`` over ``(0, stop)`` (``stop=None`` means infinity).

    ``probe(t)`` returns ``(phase, amplitude)`` at a single ``t``: the
    imaginary part of the exponent and ``|exp(g) - c|``.
    """
    integ = _Integrator(f, cfg.panel_rule_order)
    t0 = cfg.small_t_cutoff if start is None else start
    if stop is not None:
        t0 = min(t0, stop)
    panel_tol = 1e-2 * tol

    # (0, t0] in u = sqrt(t)
    def g_u(u):
        return 2.0 * u * f(u * u)

    head = _Integrator(g_u, cfg.panel_rule_order)
    s0, e0, ok0 = head.panel(0.0, math.sqrt(t0), panel_tol)
    total_err = e0
    all_ok = ok0
    sums = [s0]
    t = t0
    if stop is not None and t >= stop:
        return _MarchResult(s0, e0, head.evaluations, ok0)

    half = math.pi / abs(a) if a != 0 else math.inf
    phase_prev, amp_prev = probe(t)
    amps = [amp_prev]
    omega_g = 0.0
    aligned = 0
    growth = 0
    order = cfg.acceleration_order
    estimates: list[float] = []
    accel_start = None
    value = None
    extrap_err = math.inf
    while True:
        cap = math.pi / max(omega_g, 1e-300)
        step = min(max(t, t0), cap, half)
        if half <= min(max(t, t0), cap) * (1 + 1e-12):
            # aligned regime: end on the next zero of sin(t a)
            k = math.floor(t / half + 1e-9) + 1
            hi = k * half
            if hi - t < 0.25 * half:
                hi += half
            aligned += 1
        else:
            hi = t + step
            growth += 1
        if stop is not None and hi >= stop:
            hi = stop
        q, e, ok = integ.panel(t, hi, panel_tol)
        total_err += e
        all_ok = all_ok and ok
        sums.append(sums[-1] + q)
        phase, amp = probe(hi)
        omega_g = abs(phase - phase_prev) / (hi - t)
        phase_prev = phase
        amps.append(amp)
        t = hi
        if stop is not None and t >= stop:
            value, extrap_err = sums[-1], 0.0
            break
        if aligned > cfg.max_half_periods or growth > _GROWTH_PANELS:
            break
        if stop is not None:
            continue
        # absolute decay: the tail is bounded by the amplitude
        if len(amps) >= 4 and amp <= 0.1 * tol and amps[-2] <= 0.1 * tol and amps[-3] >= amp:
            value, extrap_err = sums[-1], amp
            break
        # accelerated tail
        if aligned >= 1 or (a == 0 and t > 1.0):
            if accel_start is None:
                # only the oscillatory regime is fed to the extrapolation
                accel_start = len(sums) - 1
            window = sums[max(accel_start, len(sums) - (2 * order + 1)):]
            if len(window) < 4:
                continue
            est, est_err = wynn_epsilon(window)
            estimates.append(est)
            if len(estimates) >= 3 and len(window) >= min(2 * order + 1, 7) and est_err <= tol:
                spread = max(abs(estimates[-1] - estimates[-2]), abs(estimates[-1] - estimates[-3]))
                if spread <= 0.1 * tol:
                    value, extrap_err = est, max(spread, min(est_err, tol))
                    break
    converged = value is not None
    if not converged:
        value = estimates[-1] if estimates else sums[-1]
        extrap_err = abs(sums[-1] - sums[-2]) if len(sums) > 1 else math.inf
    return _MarchResult(
        value,
        total_err + extrap_err,
        integ.evaluations + head.evaluations,
        converged and all_ok,
    )


def _finish(raw, err, evals, converged, cfg: QuadratureConfig) -> CdfEstimate:
    clipped = False
    value = raw
    if raw < 0.0 or raw > 1.0:
        excess = -raw if raw < 0 else raw - 1.0
        if excess >= 10.0 * cfg.abs_tol:
            converged = False
        value = min(max(raw, 0.0), 1.0)
        clipped = True
    if not math.isfinite(err) or err > cfg.abs_tol:
        converged = False
    return CdfEstimate(float(value), float(err), int(evals), bool(converged), clipped)


def invert_cdf(
    exponent: Callable,
    a: float,
    cfg: QuadratureConfig | None = None,
    atom: float | None = None,
) -> CdfEstimate:
    """CDF at ``a`` of the law with characteristic function ``exp(exponent)``.

    ``atom`` is the limit of ``exp(exponent(t))`` as ``t -> inf`` (the mass
    at zero for compound Poisson laws); supplying it removes the
    conditionally convergent part of the tail. At a jump the midpoint
    ``(F(a-) + F(a+)) / 2`` is returned.
    """
    cfg = cfg or QuadratureConfig()
    a = float(a)
    truncate = cfg.hard_truncation
    c = 0.0 if (atom is None or truncate is not None) else float(atom)

    def f(t):
        z = np.exp(np.asarray(exponent(t), dtype=complex) - 1j * t * a)
        if c:
            z = z - c * np.exp(-1j * t * a)
        return z.imag / t

    def probe(t):
        g = complex(exponent(t))
        return g.imag, abs(np.exp(g) - c)

    res = _march(f, probe, a, cfg, cfg.abs_tol * math.pi, stop=truncate)
    raw = 0.5 + 0.5 * c * np.sign(a) - res.integral / math.pi
    return _finish(raw, res.error / math.pi, res.evaluations, res.converged, cfg)


def invert_cdf_symmetric(
    exponent: Callable,
    a: float,
    cfg: QuadratureConfig | None = None,
    atom: float | None = None,
) -> CdfEstimate:
    """Sine-form inversion for a real, even exponent."""
    cfg = cfg or QuadratureConfig()
    a = float(a)
    if a == 0.0:
        return CdfEstimate(0.5, 0.0, 0, True, False)
    truncate = cfg.hard_truncation
    c = 0.0 if (atom is None or truncate is not None) else float(atom)

    def f(t):
        g = np.real(np.asarray(exponent(t)))
        return (np.exp(g) - c) * np.sin(t * a) / t

    def probe(t):
        g = float(np.real(exponent(t)))
        return 0.0, abs(math.exp(g) - c)

    res = _march(f, probe, a, cfg, cfg.abs_tol * math.pi, stop=truncate)
    raw = 0.5 + 0.5 * c * np.sign(a) + res.integral / math.pi
    return _finish(raw, res.error / math.pi, res.evaluations, res.converged, cfg)


def bddf(desc: FamilyDescriptor, a: float, cfg: QuadratureConfig | None = None) -> CdfEstimate:
    """Background driving distribution function ``G_X(a)``."""
    if desc.symmetric:
        return invert_cdf_symmetric(lambda t: desc.eta(t).real, a, cfg, atom=desc.atom_mass_at_zero)
    return invert_cdf(desc.eta, a, cfg, atom=desc.atom_mass_at_zero)


def cdf_of_x(desc: FamilyDescriptor, a: float, cfg: QuadratureConfig | None = None) -> CdfEstimate:
    """CDF of the selfdecomposable variable ``X`` itself."""
    if desc.symmetric:
        return invert_cdf_symmetric(lambda t: desc.log_cf(t).real, a, cfg)
    return invert_cdf(desc.log_cf, a, cfg)


def bessel_transform_rhs(t):
    """``(1/t) sqrt(-t/(t+2i))`` with the conjugate-symmetric extension to ``t < 0``."""
    t = float(t)
    if t == 0.0:
        raise ValueError("t must be non-zero")
    s = abs(t)
    val = np.sqrt(complex(-s / (s + 2j))) / s
    return complex(val if t > 0 else np.conj(val))


def bessel_transform_check(t: float, cfg: QuadratureConfig | None = None) -> tuple[complex, complex]:
    """Both sides of ``int_0^inf e^{itx} e^{-x} I_0(x) dx = (1/t) sqrt(-t/(t+2i))``.

    The left side is integrated numerically; ``e^{-x} I_0(x)`` decays only
    like ``x^{-1/2}``, so the same accelerated panel march is used.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    cfg = cfg or QuadratureConfig(abs_tol=1e-9, max_half_periods=20000)

    def probe(x):
        return 0.0, float(special.ive(0, x))

    # the integrand carries no 1/x factor; pass x * f / x through the march
    parts = []
    for trig in (np.cos, np.sin):
        res = _march(lambda x, trig=trig: trig(t * x) * special.ive(0, x), probe, t, cfg, cfg.abs_tol)
        if not res.converged:
            from .specfun import ConvergenceError

            raise ConvergenceError(f"Bessel transform did not converge at t={t}")
        parts.append(res.integral)
    return complex(parts[0], parts[1]), bessel_transform_rhs(t)
