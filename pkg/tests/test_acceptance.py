"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS``/``FAIL`` line (visible even without ``-s``)
and then asserts, so ``pytest -v tests/test_acceptance.py`` doubles as the
acceptance report.
"""

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from expnewton.model import M0, _rhs_unchecked, pde_residual, radial_lift
from expnewton.phase import (OrbitConfig, PhaseState, crossing_slope, field_desingularized, find_equilibria,
                             integrate_orbit, linearize)
from expnewton.picard import PicardConfig, choose_radius, contraction_ratios, picard_solve
from expnewton.radial import SolveConfig, solve_from_axis
from expnewton.resistance import nonexistence_demo, resistance_cone


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def test_c01_maximal_domain(report):
    t0 = time.perf_counter()
    term = solve_from_axis(SolveConfig(method="parametric")).terminal
    dt = time.perf_counter() - t0
    ok = abs(term.r - 1.230) <= 5e-3 and abs(term.u - 0.228) <= 5e-3 and dt < 1.0
    report(1, ok, f"r_M={term.r:.6f} u(r_M)={term.u:.6f} runtime={dt:.3f}s")


def test_c02_critical_slope(report):
    p = solve_from_axis(SolveConfig(method="parametric")).terminal.p
    report(2, abs(p - 1 / math.sqrt(3)) <= 1e-6, f"terminal slope={p:.12f} |diff|={abs(p - M0):.2e}")


def test_c03_axis_curvature(report):
    prof = solve_from_axis(SolveConfig(method="parametric"))
    rs = (1e-2, 5e-3, 2.5e-3)
    q = [prof.evaluate(r)[1] / r for r in rs]
    a, b = (4 * q[1] - q[0]) / 3, (4 * q[2] - q[1]) / 3
    est = (16 * b - a) / 15
    report(3, abs(est - 0.25) <= 1e-3, f"u''(0) by Richardson = {est:.12f}")


def test_c04_contraction(report):
    t0 = time.perf_counter()
    cfg = PicardConfig(epsilon=0.2, R=choose_radius(0.2).R)
    ratios = contraction_ratios(cfg, pairs=20, seed=0)
    observed = picard_solve(cfg).observed_ratio
    dt = time.perf_counter() - t0
    ok = ratios.max() <= 0.55 and observed <= 0.55 and dt < 5.0
    report(4, ok, f"max pair ratio={ratios.max():.3e} observed_ratio={observed:.3e} runtime={dt:.3f}s")


def test_c05_cross_solver(report):
    rep = picard_solve(PicardConfig(epsilon=0.2))
    direct = solve_from_axis(SolveConfig(method="direct"))
    param = solve_from_axis(SolveConfig(method="parametric"))
    rs = np.linspace(0.0, rep.radius.R, 200)
    du = max(abs(rep.final.evaluate(r)[0] - direct.evaluate(r)[0]) for r in rs)
    dr = abs(direct.terminal.r - param.terminal.r)
    report(5, du <= 1e-8 and dr <= 1e-4, f"max |u_picard - u_direct| on [0,R]={du:.2e}  |r_M diff|={dr:.2e}")


def test_c06_phase_facts(report):
    xs = np.linspace(0.05, 5.0, 50)
    s0 = max(abs(crossing_slope(x, "theta0") - 0.5) for x in xs)
    s2 = max(abs(crossing_slope(x, "thetaPi2") + 0.5) for x in xs)
    ortho = all(crossing_slope(x, "thetaPi6") == math.inf for x in xs if abs(x - M0) > 1e-6)
    centers = [r for r in find_equilibria() if r.kind == "center"]
    resid = max(math.hypot(*field_desingularized(r.location)) for r in centers)
    eig = linearize(PhaseState(M0, math.pi / 6)).eigenvalues
    re = float(np.max(np.abs(eig.real)))
    im = float(np.max(np.abs(np.abs(eig.imag) - math.sqrt(4.5))))
    ok = s0 <= 1e-12 and s2 <= 1e-12 and ortho and len(centers) == 2 and resid < 1e-12 and re < 1e-10 and im < 1e-10
    report(6, ok, f"slope errs {s0:.1e}/{s2:.1e} orthogonal={ortho} P1/P2 residual={resid:.1e} "
                  f"|Re|={re:.1e} ||Im|-sqrt(4.5)|={im:.1e}")


_worst_return = [0.0]


@settings(max_examples=40, deadline=None, derandomize=True)
@given(st.floats(0.0, 2 * math.pi))
def _closure_property(phi):
    start = PhaseState(M0 + 1e-2 * math.cos(phi), math.pi / 6 + 1e-2 * math.sin(phi))
    orbit = integrate_orbit(start, OrbitConfig(orientation="field"))
    d = orbit.return_distance if orbit.return_distance is not None else math.inf
    _worst_return[0] = max(_worst_return[0], d)
    assert orbit.termination == "closed" and d < 1e-4


def test_c07_center_behavior(report):
    _worst_return[0] = 0.0
    try:
        _closure_property()
        ok = True
    except AssertionError:
        ok = False
    report(7, ok, f"40 launches at distance 1e-2 from P1, worst return distance={_worst_return[0]:.2e}")


def test_c08_monotone_convex(report):
    worst = []
    for method in ("parametric", "direct"):
        prof = solve_from_axis(SolveConfig(method=method))
        inside = (prof.r > 0) & (prof.r < prof.terminal.r)
        r, p = prof.r[inside], prof.p[inside]
        worst.append((method, float(p.min()), float(_rhs_unchecked(r, p).min()), int(inside.sum())))
    ok = all(pm > 0 and ddm > 0 for _, pm, ddm, _ in worst)
    report(8, ok, "; ".join(f"{m}: {n} steps, min u'={pm:.2e}, min u''={ddm:.3f}" for m, pm, ddm, n in worst))


def test_c09_pde_consistency(report):
    prof = solve_from_axis(SolveConfig(method="parametric"))
    rM = prof.terminal.r
    h = 1e-3
    worst = 0.0
    for i, r in enumerate(np.linspace(0.01, 0.95 * rM, 100)):
        ps = [prof.evaluate(r + k * h)[1] for k in (-2, -1, 1, 2)]
        dp = (ps[0] - 8 * ps[1] + 8 * ps[2] - ps[3]) / (12 * h)
        grad, hess = radial_lift(r, prof.evaluate(r)[1], dp, angle=0.37 * i)
        worst = max(worst, abs(pde_residual(grad, hess)))
    report(9, worst < 1e-5, f"max |PDE residual| over 100 radii={worst:.2e}")


def test_c10_nonexistence(report):
    tab = nonexistence_demo(1.0, [1.0, 10.0, 100.0])
    rel = max(abs(v - resistance_cone(l, 1.0).value) / resistance_cone(l, 1.0).value
              for l, v in zip(tab.lambdas, tab.values))
    ratio = tab.values[-1] / tab.values[0]
    report(10, ratio < 1e-3 and rel <= 1e-6, f"E(100)/E(1)={ratio:.3e} max rel err vs closed form={rel:.1e}")
