"""Phase plane of the profile curve in arclength form.

A profile curve is written as ``(x(s), y(s))`` with unit speed and inclination
``theta``, so ``x' = cos(theta)``, ``y' = sin(theta)`` and ``theta'`` is the
curvature.  Dropping ``y`` leaves a planar autonomous system in (x, theta)
that is singular on ``x = 0`` and on the critical lines ``cos(2 theta) = 1/2``.
Multiplying through by ``2x(2 cos 2theta - 1)`` removes those singularities.

Sign convention: the multiplied field is the exact product of the reduced
field with that factor, i.e. ``theta' = cos(theta) (x (2 - cos 2theta) - sin 2theta)``.
With this sign the equilibria off the vertical lines are linear centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import rk
from .errors import (AtCenter, BadConfig, BudgetExhausted, ChartSingularity, NotEquilibrium,
                     StartIsEquilibrium)
from .model import M0

SQRT3 = math.sqrt(3.0)
P1 = (M0, math.pi / 6)
P2 = (-M0, -math.pi / 6)
_CHART_EPS = 1e-12


@dataclass(frozen=True)
class PhaseState:
    x: float
    theta: float
    y: float = 0.0


class OrbitClass(str, Enum):
    AXIS_TO_CRITICAL = "AxisToCritical"
    CLOSED_AROUND_CENTER = "ClosedAroundCenter"
    VERTICAL_ASYMPTOTE = "VerticalAsymptote"
    LEAVES_CHART = "LeavesChart"


@dataclass
class EquilibriumReport:
    kind: str  # center | saddle | line-of-equilibria | other
    location: PhaseState | None = None
    line: str | None = None  # e.g. "theta = pi/2 + k*pi"
    jacobian: np.ndarray | None = None
    eigenvalues: np.ndarray | None = None
    crossing_slope: float | None = None


@dataclass(frozen=True)
class OrbitConfig:
    """Orbit integration settings.

    ``orientation="arclength"`` follows the curve in the direction of
    increasing arclength and stops on the critical lines, where the curve
    itself ends.  ``orientation="field"`` follows the multiplied field through
    the critical lines, which is what the phase portrait shows; closed loops
    are only detectable in this mode.
    """

    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = 0.25
    event_tol: float = 1e-10
    tau_max: float = 400.0
    orientation: str = "arclength"
    closure_tol: float = 1e-4
    reverse: bool = False


@dataclass
class OrbitEvent:
    name: str
    tau: float
    state: PhaseState


@dataclass
class Orbit:
    start: PhaseState
    tau: np.ndarray
    x: np.ndarray
    theta: np.ndarray
    y: np.ndarray
    events: list[OrbitEvent]
    termination: str  # critical | axis | vertical | closed | return-miss
    axis: bool = False
    orientation: str = "arclength"
    sign: float = 1.0
    return_distance: float | None = None
    solution: rk.Solution | None = field(default=None, repr=False)

    @property
    def terminal(self) -> PhaseState:
        return PhaseState(float(self.x[-1]), float(self.theta[-1]), float(self.y[-1]))

    @property
    def stats(self) -> dict:
        sol = self.solution
        if sol is None:
            return {}
        return {"accepted_steps": sol.accepted, "rejected_steps": sol.rejected, "nfev": sol.nfev}


def chart_factor(x: float, theta: float) -> float:
    """``2x(2cos 2theta - 1)``: multiplier between the reduced and regular fields."""
    return 2.0 * x * (2.0 * math.cos(2.0 * theta) - 1.0)


def field_reduced(state: PhaseState) -> tuple[float, float]:
    x, th = state.x, state.theta
    den = 2.0 * x * (2.0 * math.cos(2.0 * th) - 1.0)
    if abs(x) < _CHART_EPS or abs(2.0 * math.cos(2.0 * th) - 1.0) < _CHART_EPS:
        raise ChartSingularity(f"reduced field undefined at x={x!r}, theta={th!r}")
    c = math.cos(th)
    return c, c * (x * (2.0 - math.cos(2.0 * th)) - math.sin(2.0 * th)) / den


def field_desingularized(state: PhaseState) -> tuple[float, float]:
    x, th = state.x, state.theta
    c, c2 = math.cos(th), math.cos(2.0 * th)
    return 2.0 * x * (2.0 * c2 - 1.0) * c, c * (x * (2.0 - c2) - math.sin(2.0 * th))


def jacobian(x: float, theta: float) -> np.ndarray:
    """Analytic Jacobian of the desingularized field."""
    c, s = math.cos(theta), math.sin(theta)
    c2, s2 = math.cos(2 * theta), math.sin(2 * theta)
    return np.array([
        [2.0 * (2.0 * c2 - 1.0) * c, 2.0 * x * (-4.0 * s2 * c - (2.0 * c2 - 1.0) * s)],
        [c * (2.0 - c2), -s * (x * (2.0 - c2) - s2) + c * (2.0 * x * s2 - 2.0 * c2)],
    ])


def _on_vertical_line(theta: float, tol: float = 1e-12) -> bool:
    return abs(math.cos(theta)) < tol


def linearize(point: PhaseState, tol: float = 1e-10) -> EquilibriumReport:
    """Jacobian, eigenvalues and linear type of an equilibrium."""
    fx, ft = field_desingularized(point)
    if math.hypot(fx, ft) > tol:
        raise NotEquilibrium(f"({point.x!r}, {point.theta!r}) is not an equilibrium; |F|={math.hypot(fx, ft)!r}")
    J = jacobian(point.x, point.theta)
    eig = np.linalg.eigvals(J)
    if _on_vertical_line(point.theta, 1e-9):
        # one zero eigenvalue along the line; the other gives the transverse direction
        nz = int(np.argmax(np.abs(eig)))
        w, v = np.linalg.eig(J)
        vec = np.real(v[:, nz])
        slope = vec[1] / vec[0] if abs(vec[0]) > 0 else math.inf
        return EquilibriumReport("line-of-equilibria", location=point, line="theta = pi/2 + k*pi",
                                 jacobian=J, eigenvalues=eig, crossing_slope=float(slope))
    scale = max(1.0, float(np.max(np.abs(eig))))
    if np.all(np.abs(eig.real) < tol * scale) and np.all(np.abs(eig.imag) > tol * scale):
        kind = "center"
    elif np.linalg.det(J) < 0:
        kind = "saddle"
    else:
        kind = "other"
    return EquilibriumReport(kind, location=point, jacobian=J, eigenvalues=eig)


def _polish(x: float, th: float, iters: int = 5) -> tuple[float, float]:
    z = np.array([x, th])
    for _ in range(iters):
        F = np.array(field_desingularized(PhaseState(*z)))
        if np.max(np.abs(F)) == 0.0:
            break
        z = z - np.linalg.solve(jacobian(*z), F)
    return float(z[0]), float(z[1])


def find_equilibria(x_range: tuple[float, float] = (-2.0, 2.0)) -> list[EquilibriumReport]:
    """Equilibria of the desingularized field in the strip |theta| <= pi/2.

    Off ``x = 0`` and the vertical lines, ``x' = 0`` forces ``cos 2theta = 1/2``
    and ``theta' = 0`` then fixes ``x = sin 2theta / (2 - cos 2theta)``.
    """
    lo, hi = x_range
    out = [EquilibriumReport("line-of-equilibria", line="theta = pi/2 + k*pi", crossing_slope=-0.5)]
    for th in (math.pi / 6, -math.pi / 6):
        x = math.sin(2 * th) / 1.5
        if lo <= x <= hi:
            out.append(linearize(PhaseState(*_polish(x, th))))
    if lo <= 0.0 <= hi:
        out.append(linearize(PhaseState(0.0, 0.0)))
    return out


def crossing_slope(x: float, line: str) -> float:
    """``d theta / dx`` of the flow where it meets ``theta = 0, pi/6, pi/2``.

    Uses the ratio of the two field components with the common ``cos(theta)``
    cancelled, so it is defined on the vertical line as well.  Returns
    ``math.inf`` for the orthogonal crossing of the critical line.
    """
    theta = {"theta0": 0.0, "thetaPi6": math.pi / 6, "thetaPi2": math.pi / 2}[line]
    if x <= 0:
        raise ChartSingularity("crossing slopes are defined for x > 0")
    num = x * (2.0 - math.cos(2 * theta)) - math.sin(2 * theta)
    den = 2.0 * x * (2.0 * math.cos(2 * theta) - 1.0)
    if abs(den) < _CHART_EPS:
        if abs(num) < 1e-12:
            raise AtCenter(f"x={x!r} is the center on the critical line")
        return math.inf
    return num / den


# ---------------------------------------------------------------- orbits

def regular_rhs(sign: float = 1.0):
    """Desingularized field with the height channel, scaled by ``sign``."""
    def fun(_t, z):
        x, th = z[0], z[1]
        c, c2 = math.cos(th), math.cos(2.0 * th)
        fac = 2.0 * x * (2.0 * c2 - 1.0)
        return np.array([sign * fac * c,
                         sign * c * (x * (2.0 - c2) - math.sin(2.0 * th)),
                         sign * fac * math.sin(th)])
    return fun


def integrate_orbit(start: PhaseState, config: OrbitConfig = OrbitConfig(), *, axis: bool = False) -> Orbit:
    """Trace the orbit through ``start`` until an event stops it.

    Height ``y`` is carried along via ``dy = sin(theta) * factor``.
    """
    fx, ft = field_desingularized(start)
    if math.hypot(fx, ft) < 1e-14:
        raise StartIsEquilibrium(f"start ({start.x!r}, {start.theta!r}) is an equilibrium")
    factor = chart_factor(start.x, start.theta)
    if config.orientation == "arclength":
        if abs(factor) < _CHART_EPS:
            raise ChartSingularity("arclength orientation is undefined on the critical lines")
        sign = math.copysign(1.0, factor)
    elif config.orientation == "field":
        sign = 1.0
    else:
        raise BadConfig(f"unknown orientation {config.orientation!r}")
    if config.reverse:
        sign = -sign
    fun = regular_rhs(sign)
    z0 = np.array([start.x, start.theta, start.y])
    tol = config.event_tol

    events = [
        rk.Event("axis", lambda t, z: z[0], terminal=True),
        rk.Event("vertical", lambda t, z: abs(math.cos(z[1])) - tol, terminal=True, direction=-1),
        rk.Event("critical", lambda t, z: 2.0 * math.cos(2.0 * z[1]) - 1.0,
                 terminal=config.orientation == "arclength"),
        rk.Event("theta0", lambda t, z: math.sin(z[1])),
    ]
    if config.orientation == "field":
        # Poincare section: the line through the start normal to the flow;
        # a crossing counts as a return once the orbit has been far away and
        # comes back to within half of that excursion
        n = np.array(fun(0.0, z0)[:2])
        n /= np.linalg.norm(n)
        reach = [0.0]

        def section(t, z):
            reach[0] = max(reach[0], math.hypot(z[0] - z0[0], z[1] - z0[1]))
            return float((z[:2] - z0[:2]) @ n)

        def is_return(t, z):
            return math.hypot(z[0] - z0[0], z[1] - z0[1]) < 0.5 * reach[0]

        events.append(rk.Event("section", section, terminal=True, direction=1, accept=is_return))
    sol = rk.integrate(fun, 0.0, z0, config.tau_max, rtol=config.rtol, atol=config.atol,
                       max_step=config.max_step, events=events, event_tol=tol)
    orbit_events = [OrbitEvent(h.name, h.t, PhaseState(*map(float, h.y))) for h in sol.events]
    if sol.status != "event":
        raise BudgetExhausted(f"no terminal event within tau_max={config.tau_max!r}")
    termination = next(e.name for e in reversed(orbit_events) if e.name in ("axis", "vertical", "critical", "section"))
    return_distance = None
    if termination == "section":
        return_distance = float(np.hypot(*(sol.y[-1, :2] - z0[:2])))
        termination = "closed" if return_distance < config.closure_tol else "return-miss"
    tau, traj = sol.t, sol.y
    return Orbit(start=start, tau=tau, x=traj[:, 0], theta=traj[:, 1], y=traj[:, 2],
                 events=orbit_events, termination=termination, axis=axis,
                 orientation=config.orientation, sign=sign, return_distance=return_distance,
                 solution=sol)


def classify_orbit(orbit: Orbit) -> OrbitClass:
    if orbit.termination == "closed":
        return OrbitClass.CLOSED_AROUND_CENTER
    if orbit.termination == "critical" and orbit.axis:
        return OrbitClass.AXIS_TO_CRITICAL
    if orbit.termination == "vertical" and np.all(np.isfinite(orbit.x)):
        return OrbitClass.VERTICAL_ASYMPTOTE
    return OrbitClass.LEAVES_CHART


def orbit_summary(orbit: Orbit) -> dict:
    term = orbit.terminal
    return {
        "class": classify_orbit(orbit).value,
        "termination": orbit.termination,
        "start": {"x": orbit.start.x, "theta": orbit.start.theta, "y": orbit.start.y},
        "terminal": {"tau": float(orbit.tau[-1]), "x": term.x, "theta": term.theta, "y": term.y},
        "events": [{"name": e.name, "tau": e.tau, "x": e.state.x, "theta": e.state.theta, "y": e.state.y}
                   for e in orbit.events],
        "return_distance": orbit.return_distance,
    }
