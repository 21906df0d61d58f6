import pytest

from rockmodel import sample
from rockmodel.solids import Intervals, build_model
from rockmodel.wireframe import PlanarSubdivision, Plane, UnitRegion

UNIT_SQUARE = ((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0))


@pytest.fixture
def unit_square():
    return UnitRegion(1, "square", UNIT_SQUARE)


@pytest.fixture(scope="session")
def sample_plan():
    return sample.plan()


@pytest.fixture(scope="session")
def sample_profile():
    return sample.profile()


@pytest.fixture(scope="session")
def sample_model(sample_plan, sample_profile):
    return build_model(sample_plan, sample_profile, Intervals((420.0, 470.0)), sample.frame())


@pytest.fixture
def toy_subdivisions():
    plan = PlanarSubdivision(Plane.PLAN_XY, [UnitRegion(1, "a", UNIT_SQUARE)])
    profile = PlanarSubdivision(Plane.PROFILE_XZ, [UnitRegion(1, "l", UNIT_SQUARE)])
    return plan, profile


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion in sorted(RESULTS):
        terminalreporter.write_line(f"{RESULTS[criterion]}  {criterion}")
