import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from expnewton.errors import BadParams, DomainNotCovered
from expnewton.radial import RadialProfile
from expnewton.resistance import (ResistanceDomain, cone_profile, nonexistence_demo, resistance_cone,
                                  resistance_function, resistance_radial)


def test_flat_disk():
    r = np.linspace(0, 1, 11)
    flat = RadialProfile(r, np.zeros_like(r), np.zeros_like(r), "flat")
    assert resistance_radial(flat).value == pytest.approx(math.pi, rel=1e-14)


def test_unit_cone():
    assert resistance_cone(1.0, 1.0).value == pytest.approx(math.pi / math.e, rel=1e-14)
    assert resistance_radial(cone_profile(1.0, 1.0)).value == pytest.approx(math.pi / math.e, rel=1e-12)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("R", [0.5, 1.0, 2.0])
def test_cone_oracles(lam, R):
    closed = resistance_cone(lam, R).value
    ref, _ = quad(lambda r: 2 * math.pi * r * math.exp(-lam * (R - r)) / (1 + lam * lam), 0, R,
                  epsabs=0, epsrel=1e-13)
    assert closed == pytest.approx(ref, rel=1e-12)
    res = resistance_radial(cone_profile(lam, R))
    assert res.value == pytest.approx(closed, rel=1e-6)
    assert res.error_est <= 1e-8 * res.value


def test_cone_limits():
    assert resistance_cone(1e-8, 1.5).value == pytest.approx(math.pi * 1.5**2, rel=1e-7)
    small = resistance_cone(5e-4, 1.0).value
    ref, _ = quad(lambda r: 2 * math.pi * r * math.exp(-5e-4 * (1 - r)) / (1 + 2.5e-7), 0, 1, epsrel=1e-14)
    assert small == pytest.approx(ref, rel=1e-13)
    lams = np.geomspace(2, 1e4, 30)
    vals = [resistance_cone(l, 1.0).value for l in lams]
    assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("args", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (float("inf"), 1.0)])
def test_cone_bad_params(args):
    with pytest.raises(BadParams):
        resistance_cone(*args)


def test_nonexistence_demo():
    tab = nonexistence_demo(1.0, [1.0, 10.0, 100.0])
    assert tab.values[2] < 1e-3 * tab.values[0]
    assert tab.below_threshold and tab.tail_decreasing
    for lam in (1.0, 10.0, 100.0):
        assert cone_profile(lam, 1.0).u[-1] == 0.0
    long = nonexistence_demo(1.0, np.geomspace(1, 1e3, 12))
    assert long.tail_decreasing
    assert long.values[-1] == pytest.approx(2 * math.pi / 1e9, rel=2e-3)
    with pytest.raises(BadParams):
        nonexistence_demo(1.0, [2.0, 1.0])
    with pytest.raises(BadParams):
        nonexistence_demo(1.0, [])


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.3, 2))
def test_translation_covariance(lam, R):
    prof = cone_profile(lam, R)
    lifted = RadialProfile(prof.r, prof.u + 1.0, prof.p, "cone+1")
    a, b = resistance_radial(prof).value, resistance_radial(lifted).value
    assert b == pytest.approx(a * math.exp(-1.0), rel=1e-10)
    assert a > 0


def test_extremal_between_disk_and_cone(parametric):
    rM = parametric.terminal.r
    E = resistance_radial(parametric).value
    assert resistance_cone(1.0, rM).value < E < math.pi * rM**2


def test_resistance_function_and_domain():
    res = resistance_function(lambda r: 0 * r, lambda r: 0 * r, ResistanceDomain(1.0, 2.0))
    assert res.value == pytest.approx(3 * math.pi, rel=1e-14)
    with pytest.raises(BadParams):
        ResistanceDomain(1.0, 1.0)
    with pytest.raises(BadParams):
        ResistanceDomain(-0.5, 1.0)
    with pytest.raises(DomainNotCovered):
        resistance_radial(cone_profile(1.0, 1.0), ResistanceDomain(0.0, 1.5))
