import pytest

from expnewton.picard import PicardConfig, picard_solve
from expnewton.radial import SolveConfig, solve_from_axis


@pytest.fixture(scope="session")
def parametric():
    return solve_from_axis(SolveConfig(method="parametric"))


@pytest.fixture(scope="session")
def direct():
    return solve_from_axis(SolveConfig(method="direct"))


@pytest.fixture(scope="session")
def picard_report():
    return picard_solve(PicardConfig(epsilon=0.2))
