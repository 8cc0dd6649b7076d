"""Axis and offset solutions of the radial equation.

Two routes to the maximal domain ``[0, r_M)`` of the axis solution:

* ``direct``: integrate ``(u, p)`` in ``r`` from the series start until the
  slope is within ``guard`` of the critical value, then extrapolate the
  square-root approach ``M0 - p ~ c sqrt(r_M - r)`` to the end point;
* ``parametric``: follow the curve in the regular phase-plane field, where
  the end of the graph is an ordinary crossing of ``theta = pi/6``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import rk
from .errors import BadConfig, CriticalSlope, NoEvent
from .model import M0, SERIES_RADIUS, RadialState, _rhs_unchecked, series_eval
from .phase import OrbitConfig, PhaseState, classify_orbit, integrate_orbit, regular_rhs

METHODS = ("direct", "parametric")


@dataclass(frozen=True)
class SolveConfig:
    eps0: float = 1e-3
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_step: float = 0.05
    event_tol: float = 1e-10
    method: str = "parametric"
    guard: float = 1e-4
    series_order: int = 4
    series_radius: float = SERIES_RADIUS
    r_bound: float = 10.0

    def validate(self) -> "SolveConfig":
        if not (0.0 < self.eps0 <= self.series_radius):
            raise BadConfig(f"eps0 must lie in (0, {self.series_radius!r}], got {self.eps0!r}")
        for name in ("abs_tol", "rel_tol", "max_step", "event_tol", "guard", "r_bound"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise BadConfig(f"{name} must be a positive number, got {v!r}")
        if self.method not in METHODS:
            raise BadConfig(f"method must be one of {METHODS}, got {self.method!r}")
        if self.series_order not in (2, 4):
            raise BadConfig("series_order must be 2 or 4")
        return self


@dataclass(frozen=True)
class Terminal:
    r: float
    u: float
    p: float


@dataclass
class RadialProfile:
    """Sampled radial graph ``(r, u, u')`` with an optional exact evaluator."""

    r: np.ndarray
    u: np.ndarray
    p: np.ndarray
    provenance: str
    terminal: Terminal | None = None
    dense: Callable[[float], tuple[float, float]] | None = field(default=None, repr=False)
    diagnostics: dict = field(default_factory=dict)
    orbit: object | None = field(default=None, repr=False)
    _endgame: dict | None = field(default=None, repr=False)

    @property
    def samples(self) -> list[RadialState]:
        return [RadialState(float(a), float(b), float(c)) for a, b, c in zip(self.r, self.u, self.p)]

    def __len__(self):
        return self.r.size

    def evaluate(self, r: float) -> tuple[float, float]:
        """``(u, p)`` at ``r``: the exact evaluator if present, else monotone cubic pieces."""
        if self.dense is not None:
            return self.dense(r)
        from scipy.interpolate import PchipInterpolator
        return float(PchipInterpolator(self.r, self.u)(r)), float(PchipInterpolator(self.r, self.p)(r))


def _direct_rhs(r, z):
    p = z[1]
    return np.array([p, _rhs_unchecked(r, p)])


def _series_head(config: SolveConfig, n: int = 6):
    rs = np.linspace(0.0, config.eps0, n)
    st = [series_eval(r, config.series_order, config.series_radius) for r in rs]
    return rs, np.array([s.u for s in st]), np.array([s.p for s in st])


def _assert_convex(r, z):
    p = z[1]
    if not (p > 0.0 and _rhs_unchecked(r, p) > 0.0):
        raise CriticalSlope(f"axis solution lost monotonicity/convexity at r={r!r}")


def solve_from_axis(config: SolveConfig = SolveConfig()) -> RadialProfile:
    """Axis solution ``u(0) = u'(0) = 0`` up to the end of its maximal domain."""
    config.validate()
    head_r, head_u, head_p = _series_head(config)
    start = series_eval(config.eps0, config.series_order, config.series_radius)
    if config.method == "direct":
        profile = _solve_direct(start, config, head_r, head_u, head_p)
    else:
        profile = _solve_parametric(start, config, head_r, head_u, head_p)
    r_M, u_M = refine_terminal(profile)
    profile.terminal = Terminal(float(r_M), float(u_M), float(profile.terminal.p))
    return profile


def _solve_direct(start, config, head_r, head_u, head_p) -> RadialProfile:
    target = M0 - config.guard
    ev = rk.Event("critical", lambda r, z: z[1] - target, terminal=True, direction=1)
    sol = rk.integrate(_direct_rhs, start.r, [start.u, start.p], config.r_bound,
                       rtol=config.rel_tol, atol=config.abs_tol, max_step=config.max_step,
                       events=[ev], event_tol=config.event_tol, step_check=_assert_convex)
    if sol.status != "event":
        raise NoEvent("direct integration never reached the critical slope")
    r = np.concatenate([head_r[:-1], sol.t])
    u = np.concatenate([head_u[:-1], sol.y[:, 0]])
    p = np.concatenate([head_p[:-1], sol.y[:, 1]])

    def dense(x):
        if x <= config.eps0:
            s = series_eval(max(x, 0.0), config.series_order, config.series_radius)
            return s.u, s.p
        z = sol.sol(min(x, sol.t[-1]))
        return float(z[0]), float(z[1])

    seg = sol.segments[-1]
    return RadialProfile(r, u, p, "direct", terminal=Terminal(float(sol.t[-1]), float(sol.y[-1, 0]), M0),
                         dense=dense, diagnostics=_stats(sol),
                         _endgame={"kind": "direct", "fun": _direct_rhs, "t0": seg.t0, "y0": seg.y0,
                                   "t1": float(sol.t[-1]), "target": target, "tol": config.event_tol})


def _solve_parametric(start, config, head_r, head_u, head_p) -> RadialProfile:
    oc = OrbitConfig(rtol=config.rel_tol, atol=config.abs_tol, max_step=config.max_step,
                     event_tol=config.event_tol, orientation="arclength")
    orbit = integrate_orbit(PhaseState(start.r, math.atan(start.p), start.u), oc, axis=True)
    if orbit.termination != "critical":
        raise NoEvent(f"axis orbit ended with {orbit.termination!r}, not at the critical line")
    sol = orbit.solution
    theta = orbit.theta
    r = np.concatenate([head_r[:-1], orbit.x])
    u = np.concatenate([head_u[:-1], orbit.y])
    p = np.concatenate([head_p[:-1], np.tan(theta)])

    def dense(x):
        if x <= config.eps0:
            s = series_eval(max(x, 0.0), config.series_order, config.series_radius)
            return s.u, s.p
        x = min(x, float(orbit.x[-1]))
        k = int(np.clip(np.searchsorted(orbit.x, x), 1, orbit.x.size - 1))
        seg = sol.segments[k - 1]
        a, b = seg.t0, min(seg.t1, float(orbit.tau[-1]))
        for _ in range(100):
            m = 0.5 * (a + b)
            if m in (a, b):
                break
            if seg(m)[0] < x:
                a = m
            else:
                b = m
        z = seg(0.5 * (a + b))
        return float(z[2]), float(math.tan(z[1]))

    seg = sol.segments[-1]
    diag = _stats(sol)
    profile = RadialProfile(r, u, p, "parametric",
                            terminal=Terminal(float(orbit.x[-1]), float(orbit.y[-1]), float(math.tan(theta[-1]))),
                            dense=dense, diagnostics=diag,
                            _endgame={"kind": "parametric", "fun": regular_rhs(orbit.sign), "t0": seg.t0,
                                      "y0": seg.y0, "t1": float(orbit.tau[-1]), "tol": config.event_tol})
    profile.orbit = orbit
    return profile


def _stats(sol: rk.Solution) -> dict:
    return {"accepted_steps": sol.accepted, "rejected_steps": sol.rejected, "nfev": sol.nfev}


def refine_terminal(profile: RadialProfile) -> tuple[float, float]:
    """Re-locate the end-of-graph event with exact Runge-Kutta steps.

    Secant iteration on the event function, safeguarded by the bracket
    ``[segment start, located event]``.  In direct mode the located point sits
    ``guard`` below the critical slope and the end point is extrapolated.
    """
    eg = profile._endgame
    if eg is None or profile.terminal is None:
        raise NoEvent("profile was not terminated by a critical-slope event")
    fun, t0, y0, tol = eg["fun"], eg["t0"], np.asarray(eg["y0"]), eg["tol"]
    level = eg["target"] if eg["kind"] == "direct" else math.pi / 6

    def g(t):
        z = rk.step(fun, t0, y0, t - t0)
        return z[1] - level, z

    a, b = t0, eg["t1"]
    ga = float(y0[1] - level)
    gb, zb = g(b)
    t, gt, zt = b, gb, zb
    for _ in range(60):
        if abs(gt) <= tol * 1e-2 or b == a:
            break
        t = b - gb * (b - a) / (gb - ga) if gb != ga else 0.5 * (a + b)
        if not (min(a, b) < t < max(a, b)):
            t = 0.5 * (a + b)
        gt, zt = g(t)
        if (gt < 0) == (ga < 0):
            a, ga = t, gt
        else:
            b, gb = t, gt
    if eg["kind"] == "direct":
        r, u, p = t, float(zt[0]), float(zt[1])
        dp = _rhs_unchecked(r, p)
        gap = M0 - p
        delta = gap / (2.0 * dp)
        return r + delta, u + M0 * delta - (2.0 / 3.0) * gap * delta
    return float(zt[0]), float(zt[2])


def solve_from_offset(r0: float, p0: float, config: SolveConfig = SolveConfig(),
                      p_vertical: float = 1e4, r_min: float = 1e-6) -> RadialProfile:
    """Solution through ``(r0, u=0, p0)`` continued both ways in ``r``.

    Each branch stops at the first of: slope within ``guard`` of the critical
    value, ``|p| >= p_vertical`` (a vertical tangent; the phase plane takes
    over), ``r = r_min`` or ``r = r_bound``.
    """
    config.validate()
    if r0 <= 0:
        raise BadConfig(f"r0 must be positive, got {r0!r}")
    den0 = 3.0 * p0 * p0 - 1.0
    if abs(den0) <= 6.0 * M0 * config.guard:
        raise CriticalSlope(f"p0={p0!r} is within the guard of the critical slope")
    side = math.copysign(1.0, den0)
    level = side * 6.0 * M0 * config.guard
    events = [
        rk.Event("critical", lambda r, z: 3.0 * z[1] * z[1] - 1.0 - level, terminal=True),
        rk.Event("vertical", lambda r, z: abs(z[1]) - p_vertical, terminal=True),
    ]
    branches = {}
    for name, end in (("forward", config.r_bound), ("backward", r_min)):
        sol = rk.integrate(_direct_rhs, r0, [0.0, p0], end, rtol=config.rel_tol, atol=config.abs_tol,
                           max_step=config.max_step, events=events, event_tol=config.event_tol)
        stop = sol.events[-1].name if sol.status == "event" else ("bound" if name == "forward" else "axis")
        branches[name] = (sol, stop)
    fw, bw = branches["forward"][0], branches["backward"][0]
    r = np.concatenate([bw.t[::-1], fw.t[1:]])
    u = np.concatenate([bw.y[::-1, 0], fw.y[1:, 0]])
    p = np.concatenate([bw.y[::-1, 1], fw.y[1:, 1]])

    def dense(x):
        sol = fw if x >= r0 else bw
        lo, hi = sorted((sol.t[0], sol.t[-1]))
        z = sol.sol(min(max(x, lo), hi))
        return float(z[0]), float(z[1])

    diag = {"forward_stop": branches["forward"][1], "backward_stop": branches["backward"][1],
            "forward": _stats(fw), "backward": _stats(bw)}
    try:
        orbit = integrate_orbit(PhaseState(r0, math.atan(p0)), OrbitConfig(orientation="field"))
        diag["orbit_class"] = classify_orbit(orbit).value
    except Exception as exc:  # classification is advisory for offset solutions
        diag["orbit_class"] = f"unclassified: {type(exc).__name__}"
    return RadialProfile(r, u, p, "direct", dense=dense, diagnostics=diag)
