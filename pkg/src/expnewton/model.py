"""Slope laws, the radial Euler-Lagrange equation and the axis power series.

Notation used throughout the package: ``r`` is the distance to the rotation
axis, ``u`` the height of the profile and ``p = du/dr`` its slope.  The density
of the medium decays like ``exp(-u)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AxisSingularity, CriticalSlope, OutOfRadius, OutOfRange

M0 = 1.0 / math.sqrt(3.0)
"""Critical slope: the coefficient of u'' in the radial equation vanishes here."""

M1 = 3.0 * math.sqrt(3.0) / 16.0
"""Peak momentum flux, ``momentum_flux(M0)``."""

INVERSE_TOL = 1e-14
SINGULAR_GUARD = 1e-8
SERIES_RADIUS = 1e-2


@dataclass(frozen=True)
class SlopeLaw:
    m0: float = M0
    m1: float = M1
    inverse_tol: float = INVERSE_TOL

    def f(self, x):
        return momentum_flux(x)

    def g(self, x):
        return pressure_gain(x)

    def f_inv(self, y):
        return flux_inverse(y, tol=self.inverse_tol)


@dataclass(frozen=True)
class RadialState:
    r: float
    u: float
    p: float


@dataclass(frozen=True)
class SeriesCoefficients:
    """Taylor data of the axis solution, ``p(r) = a1 r + a3 r^3 + ...``."""

    a1: float = 0.25
    a3: float = 5.0 / 128.0
    truncation_order: int = 4


AXIS_SERIES = SeriesCoefficients()


def momentum_flux(x):
    """``f(x) = x / (1 + x^2)^2``; odd, increasing on (-M0, M0)."""
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    return x / (1.0 + x * x) ** 2


def momentum_flux_prime(x):
    return (1.0 - 3.0 * x * x) / (1.0 + x * x) ** 3


def pressure_gain(x):
    """``g(x) = (1 + 3x^2) / (2 (1 + x^2)^2)``; even, range (0, 9/16]."""
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    return (1.0 + 3.0 * x * x) / (2.0 * (1.0 + x * x) ** 2)


def pressure_gain_prime(x):
    return x * (1.0 - 3.0 * x * x) / (1.0 + x * x) ** 3


def flux_inverse(y, tol: float = INVERSE_TOL, max_iter: int = 200):
    """Invert ``momentum_flux`` on [-M0, M0].

    Safeguarded Newton: every iterate keeps a sign-change bracket and falls
    back to bisection whenever the Newton step would leave it.  Works
    elementwise on arrays.  Near the endpoints ``f'`` vanishes, so the
    attainable accuracy in x there is limited by conditioning, not by ``tol``.

    Raises
    ------
    OutOfRange
        if ``|y| > M1``.
    """
    scalar = np.isscalar(y)
    shape = np.shape(y)
    y = np.asarray(y, dtype=float).ravel()
    if not np.all(np.isfinite(y)):
        raise OutOfRange("flux must be finite")
    slack = 4.0 * np.finfo(float).eps * M1
    if np.any(np.abs(y) > M1 + slack):
        raise OutOfRange(f"|flux| exceeds m1={M1!r}: max |y| = {np.max(np.abs(y))!r}")

    x = np.clip(y, -M0, M0)
    lo = np.full_like(y, -M0)
    hi = np.full_like(y, M0)
    at_edge = np.abs(y) >= M1
    active = ~at_edge
    x[at_edge] = np.sign(y[at_edge]) * M0

    for _ in range(max_iter):
        if not active.any():
            break
        xa = x[active]
        ya = y[active]
        res = momentum_flux(xa) - ya
        below = res < 0.0
        lo_a = np.where(below, xa, lo[active])
        hi_a = np.where(below, hi[active], xa)
        d = momentum_flux_prime(xa)
        with np.errstate(divide="ignore", invalid="ignore"):
            xn = xa - res / d
        bad = ~np.isfinite(xn) | (xn <= lo_a) | (xn >= hi_a)
        xn = np.where(bad, 0.5 * (lo_a + hi_a), xn)
        step = np.abs(xn - xa)
        done = (res == 0.0) | (step <= tol) | (hi_a - lo_a <= tol)
        x[active] = np.where(res == 0.0, xa, xn)
        lo[active] = lo_a
        hi[active] = hi_a
        idx = np.flatnonzero(active)
        active[idx[done]] = False

    return float(x[0]) if scalar else x.reshape(shape)


def ode_residual(r, p, dp):
    """Residual of the expanded radial equation for slope ``p`` and ``dp = p'``."""
    p2 = p * p
    return r * (1.0 + 4.0 * p2 + 3.0 * p2 * p2) - 2.0 * p * (1.0 + p2) + 2.0 * r * dp * (3.0 * p2 - 1.0)


def ode_rhs(r: float, p: float, guard: float = SINGULAR_GUARD) -> float:
    """Solve the radial equation for ``u''``.

    Raises ``AxisSingularity`` at r <= 0 and ``CriticalSlope`` when
    ``|3p^2 - 1| < guard``.
    """
    if r <= 0.0:
        raise AxisSingularity(f"ode_rhs needs r > 0, got r={r!r}")
    den = 3.0 * p * p - 1.0
    if abs(den) < guard:
        raise CriticalSlope(f"slope p={p!r} is at the critical value 1/sqrt(3)")
    return _rhs_unchecked(r, p, den)


def _rhs_unchecked(r, p, den=None):
    p2 = p * p
    if den is None:
        den = 3.0 * p2 - 1.0
    return -(1.0 + 4.0 * p2 + 3.0 * p2 * p2) / (2.0 * den) + p * (1.0 + p2) / (r * den)


def pde_residual(grad, hess) -> float:
    """Residual of the two-dimensional Euler-Lagrange equation.

    ``2(1+|Du|^2) Lap u - 8 D^2u(Du, Du) - (1+|Du|^2)(1+3|Du|^2)``.
    """
    grad = np.asarray(grad, dtype=float)
    hess = np.asarray(hess, dtype=float)
    q = float(grad @ grad)
    lap = float(np.trace(hess))
    return 2.0 * (1.0 + q) * lap - 8.0 * float(grad @ hess @ grad) - (1.0 + q) * (1.0 + 3.0 * q)


def radial_lift(r: float, p: float, dp: float, angle: float = 0.0):
    """Gradient and Hessian of ``U(x, y) = u(|(x, y)|)`` at polar point (r, angle)."""
    n = np.array([math.cos(angle), math.sin(angle)])
    grad = p * n
    nn = np.outer(n, n)
    hess = dp * nn + (p / r) * (np.eye(2) - nn)
    return grad, hess


def series_eval(r: float, order: int = 4, radius: float = SERIES_RADIUS,
                coeffs: SeriesCoefficients = AXIS_SERIES) -> RadialState:
    """Truncated Taylor expansion of the axis solution ``u(0) = u'(0) = 0``."""
    if order not in (2, 4):
        raise OutOfRadius(f"series order must be 2 or 4, got {order}")
    if r < 0.0 or r > radius:
        raise OutOfRadius(f"r={r!r} outside series radius [0, {radius!r}]")
    u = 0.5 * coeffs.a1 * r * r
    p = coeffs.a1 * r
    if order == 4:
        u += 0.25 * coeffs.a3 * r**4
        p += coeffs.a3 * r**3
    return RadialState(r=r, u=u, p=p)
