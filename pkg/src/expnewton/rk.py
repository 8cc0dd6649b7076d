"""Dormand-Prince 5(4) integrator with PI step control, dense output and events.

Kept deliberately small: the radial and phase-plane solvers need access to
every accepted step (convexity checks, diagnostics), the count of rejected
steps, and event location on the dense output of the last step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import StepUnderflow

# Butcher tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_A = [np.array(row) for row in _A]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# difference between 5th and embedded 4th order weights
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
# Shampine's free 4th-order interpolant, coefficients of theta, theta^2, theta^3, theta^4
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
# PI controller exponents (Hairer-Wanner DOPRI5 defaults)
ALPHA = 0.17
BETA = 0.04


@dataclass
class Event:
    """Zero of ``fun(t, y)`` to be located during integration.

    ``direction`` > 0 only triggers on upward crossings, < 0 on downward ones.
    ``accept`` can veto a located crossing (it is then ignored entirely).
    """

    name: str
    fun: Callable[[float, np.ndarray], float]
    terminal: bool = False
    direction: int = 0
    accept: Callable[[float, np.ndarray], bool] | None = None


@dataclass
class EventHit:
    name: str
    t: float
    y: np.ndarray


@dataclass
class Segment:
    t0: float
    t1: float
    y0: np.ndarray
    Q: np.ndarray  # (n, 4)

    def __call__(self, t):
        h = self.t1 - self.t0
        s = (t - self.t0) / h
        return self.y0 + h * (self.Q @ np.array([s, s * s, s**3, s**4]))

    def derivative(self, t):
        h = self.t1 - self.t0
        s = (t - self.t0) / h
        return self.Q @ np.array([1.0, 2 * s, 3 * s * s, 4 * s**3])


@dataclass
class Solution:
    t: np.ndarray
    y: np.ndarray  # (n_steps + 1, dim)
    segments: list[Segment]
    events: list[EventHit] = field(default_factory=list)
    accepted: int = 0
    rejected: int = 0
    nfev: int = 0
    status: str = "finished"  # or "event"

    def _segment_for(self, t):
        ends = np.array([s.t1 for s in self.segments])
        if ends.size and ends[-1] < self.segments[0].t0:
            idx = np.searchsorted(-ends, -t)
        else:
            idx = np.searchsorted(ends, t)
        return self.segments[min(max(idx, 0), len(self.segments) - 1)]

    def sol(self, t):
        """Dense output at a single time inside the integration range."""
        return self._segment_for(t)(t)

    def sol_derivative(self, t):
        return self._segment_for(t).derivative(t)


def _locate(ev: Event, seg: Segment, ga: float, gb: float, tol: float):
    """Bisection on the dense output until ``|g| <= tol``; returns (t, y)."""
    a, b = seg.t0, seg.t1
    ya, yb = seg(a), seg(b)
    for _ in range(200):
        m = 0.5 * (a + b)
        if m == a or m == b:
            break
        ym = seg(m)
        gm = ev.fun(m, ym)
        if abs(gm) <= tol:
            return m, ym
        if (gm < 0) == (ga < 0):
            a, ga, ya = m, gm, ym
        else:
            b, gb, yb = m, gm, ym
    return (a, ya) if abs(ga) <= abs(gb) else (b, yb)


def step(fun, t: float, y, h: float) -> np.ndarray:
    """Single fifth-order Dormand-Prince step, no error control."""
    y = np.asarray(y, dtype=float)
    K = np.empty((7, y.size))
    K[0] = fun(t, y)
    for i in range(1, 6):
        K[i] = fun(t + _C[i] * h, y + h * (_A[i] @ K[:i]))
    return y + h * (_B[:6] @ K[:6])


def _triggers(ev: Event, ga: float, gb: float) -> bool:
    if ga == 0.0:
        return False
    if (ga < 0) == (gb < 0) and gb != 0.0:
        return False
    up = gb > ga
    return ev.direction == 0 or (ev.direction > 0) == up


def _initial_step(fun, t0, y0, f0, direction, rtol, atol):
    scale = atol + np.abs(y0) * rtol
    d0 = np.linalg.norm(y0 / scale) / np.sqrt(y0.size)
    d1 = np.linalg.norm(f0 / scale) / np.sqrt(y0.size)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    y1 = y0 + h0 * direction * f0
    f1 = fun(t0 + h0 * direction, y1)
    d2 = np.linalg.norm((f1 - f0) / scale) / np.sqrt(y0.size) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1)


def integrate(fun: Callable[[float, np.ndarray], np.ndarray], t0: float, y0, t_end: float, *,
              rtol: float = 1e-10, atol: float = 1e-12, max_step: float = np.inf,
              first_step: float | None = None, events: Sequence[Event] = (),
              event_tol: float = 1e-10, max_steps: int = 200_000,
              step_check: Callable[[float, np.ndarray], None] | None = None) -> Solution:
    """Integrate ``y' = fun(t, y)`` from ``t0`` towards ``t_end``.

    Backward integration (``t_end < t0``) is supported.  Terminal events
    truncate the solution at the located event time.  ``step_check`` is called
    on every accepted step and may raise to abort.
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    direction = 1.0 if t_end >= t0 else -1.0
    f = np.asarray(fun(t, y), dtype=float)
    nfev = 1
    h = first_step if first_step is not None else _initial_step(fun, t, y, f, direction, rtol, atol)
    nfev += 1
    h = min(abs(h), max_step)
    ts, ys, segs, hits = [t], [y.copy()], [], []
    g_prev = [ev.fun(t, y) for ev in events]
    err_prev = 1e-4
    accepted = rejected = 0
    K = np.empty((7, y.size))

    while (t_end - t) * direction > 0:
        if accepted + rejected > max_steps:
            raise StepUnderflow(f"step budget of {max_steps} exhausted at t={t!r}")
        min_h = 16 * np.finfo(float).eps * max(1.0, abs(t))
        remaining = abs(t_end - t)
        # never leave a sliver shorter than min_h before t_end
        h = remaining if remaining - h < min_h else h
        if h < min_h and h < remaining:
            raise StepUnderflow(f"step size underflow at t={t!r} (h={h!r})")
        hs = h * direction
        K[0] = f
        for i in range(1, 7):
            yi = y + hs * (_A[i] @ K[:i])
            K[i] = fun(t + _C[i] * hs, yi)
        nfev += 6
        y_new = y + hs * (_B @ K)
        f_new = K[6]
        scale = atol + np.maximum(np.abs(y), np.abs(y_new)) * rtol
        err_vec = hs * (_E @ K) / scale
        err = float(np.sqrt(np.mean(err_vec * err_vec)))
        if not np.isfinite(err):
            rejected += 1
            h *= MIN_FACTOR
            continue
        if err <= 1.0:
            if err == 0.0:
                factor = MAX_FACTOR
            else:
                factor = min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * err ** -ALPHA * err_prev**BETA))
            err_prev = max(err, 1e-4)
            t_new = t_end if h == remaining else t + hs
            seg = Segment(t, t_new, y.copy(), (K.T @ _P).copy())
            segs.append(seg)
            accepted += 1
            stop = None
            for k, ev in enumerate(events):
                g_new = ev.fun(t_new, y_new)
                if _triggers(ev, g_prev[k], g_new):
                    te, ye = _locate(ev, seg, g_prev[k], g_new, event_tol)
                    if ev.accept is not None and not ev.accept(te, ye):
                        g_prev[k] = g_new
                        continue
                    hits.append(EventHit(ev.name, te, ye))
                    if ev.terminal and (stop is None or (te - stop[0]) * direction < 0):
                        stop = (te, ye)
                g_prev[k] = g_new
            if stop is not None:
                te, ye = stop
                seg.t1 = t_new
                ts.append(te)
                ys.append(np.array(ye))
                # drop later non-terminal hits that fall after the terminal time
                hits = [hh for hh in hits if (hh.t - te) * direction <= 0]
                hits.sort(key=lambda hh: hh.t * direction)
                if step_check is not None:
                    step_check(te, np.array(ye))
                return Solution(np.array(ts), np.array(ys), segs, hits, accepted, rejected, nfev, "event")
            t, y, f = t_new, y_new, f_new
            ts.append(t)
            ys.append(y.copy())
            if step_check is not None:
                step_check(t, y)
            h = min(abs(hs) * factor, max_step)
        else:
            rejected += 1
            h *= max(MIN_FACTOR, SAFETY * err ** -0.2)

    return Solution(np.array(ts), np.array(ys), segs, hits, accepted, rejected, nfev, "finished")
