"""Resistance of radial shapes in a medium with density ``exp(-z)``.

For ``u = u(r)`` on an annulus ``inner <= r <= outer`` the functional reduces to

    E = 2 pi int r exp(-u) / (1 + u'^2) dr.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import BadParams, DomainNotCovered
from .quadrature import adaptive_gauss_legendre
from .radial import RadialProfile


@dataclass(frozen=True)
class ResistanceDomain:
    inner: float = 0.0
    outer: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.inner < self.outer) or not math.isfinite(self.outer):
            raise BadParams(f"need 0 <= inner < outer, got ({self.inner!r}, {self.outer!r})")


@dataclass(frozen=True)
class ResistanceResult:
    value: float
    error_est: float


def _integrate(u_fn, p_fn, domain: ResistanceDomain, rtol: float, breakpoints=()) -> ResistanceResult:
    def integrand(r):
        return r * np.exp(-u_fn(r)) / (1.0 + p_fn(r) ** 2)

    val, err = adaptive_gauss_legendre(integrand, domain.inner, domain.outer, rtol=rtol,
                                       breakpoints=breakpoints)
    return ResistanceResult(2.0 * math.pi * val, 2.0 * math.pi * err)


def resistance_function(u_fn, p_fn, domain: ResistanceDomain, rtol: float = 1e-10) -> ResistanceResult:
    """Resistance of a shape given by vectorised callables ``u(r)`` and ``u'(r)``."""
    return _integrate(u_fn, p_fn, domain, rtol)


def resistance_radial(profile: RadialProfile, domain: ResistanceDomain | None = None,
                      rtol: float = 1e-10) -> ResistanceResult:
    """Resistance of a sampled profile.

    Height and slope are interpolated separately by monotone cubic pieces
    (PCHIP), which keeps monotone or convex solver output monotone.  The
    default domain is the full sampled range.
    """
    r = np.asarray(profile.r, dtype=float)
    if domain is None:
        domain = ResistanceDomain(float(r[0]), float(r[-1]))
    slack = 1e-12 * max(1.0, abs(r[-1]))
    if domain.inner < r[0] - slack or domain.outer > r[-1] + slack:
        raise DomainNotCovered(f"profile covers [{r[0]!r}, {r[-1]!r}], domain is [{domain.inner!r}, {domain.outer!r}]")
    if not (np.all(np.isfinite(profile.u)) and np.all(np.isfinite(profile.p))):
        raise BadParams("profile contains non-finite samples")
    u_fn = PchipInterpolator(r, profile.u, extrapolate=True)
    p_fn = PchipInterpolator(r, profile.p, extrapolate=True)
    inside = r[(r > domain.inner) & (r < domain.outer)]
    return _integrate(u_fn, p_fn, domain, rtol, breakpoints=inside)


def cone_profile(lam: float, R: float, samples: int = 257) -> RadialProfile:
    """Samples of the cone ``u(r) = lam (R - r)`` on [0, R]."""
    _check_cone(lam, R)
    r = np.linspace(0.0, R, samples)
    return RadialProfile(r, lam * (R - r), np.full_like(r, -lam), "cone")


def _check_cone(lam, R):
    if not (lam > 0 and R > 0 and math.isfinite(lam) and math.isfinite(R)):
        raise BadParams(f"cone needs lambda > 0 and R > 0, got ({lam!r}, {R!r})")


def resistance_cone(lam: float, R: float) -> ResistanceResult:
    """Closed form ``2 pi / (1 + lam^2) * (R/lam - (1 - exp(-lam R)) / lam^2)``."""
    _check_cone(lam, R)
    x = lam * R
    if x < 1e-3:
        # (x - 1 + e^{-x}) / lam^2 = R^2 (1/2 - x/6 + x^2/24 - x^3/120 + ...)
        core = R * R * (0.5 - x / 6.0 + x * x / 24.0 - x**3 / 120.0 + x**4 / 720.0)
    else:
        core = (x + math.expm1(-x)) / (lam * lam)
    value = 2.0 * math.pi / (1.0 + lam * lam) * core
    return ResistanceResult(value, float(4.0 * np.finfo(float).eps * value))


@dataclass
class NonexistenceTable:
    R: float
    lambdas: list[float]
    values: list[float]
    errors: list[float]
    threshold: float

    @property
    def rows(self):
        return list(zip(self.lambdas, self.values, self.errors))

    @property
    def tail_decreasing(self) -> bool:
        v = self.values
        return all(b < a for a, b in zip(v[len(v) // 2:], v[len(v) // 2 + 1:]))

    @property
    def ratio(self) -> float:
        return self.values[-1] / self.values[0]

    @property
    def below_threshold(self) -> bool:
        return self.ratio < self.threshold


def nonexistence_demo(R: float, lambdas, threshold: float = 1e-3) -> NonexistenceTable:
    """Resistance of the cones ``lam (R - r)`` by quadrature, for increasing ``lam``.

    Every cone vanishes on the boundary circle and is nonnegative, yet the
    resistance tends to zero, so no admissible shape attains the infimum.
    """
    lambdas = [float(v) for v in lambdas]
    if not lambdas or any(v <= 0 for v in lambdas) or any(b <= a for a, b in zip(lambdas, lambdas[1:])):
        raise BadParams("lambdas must be a nonempty, positive, strictly increasing list")
    values, errs = [], []
    for lam in lambdas:
        res = resistance_radial(cone_profile(lam, R), ResistanceDomain(0.0, R))
        values.append(res.value)
        errs.append(res.error_est)
    return NonexistenceTable(R, lambdas, values, errs, threshold)
