import pytest
from hypothesis import settings

from qdlab.contour import Tolerances
from qdlab.cover import build_cover, homology_cycles
from qdlab.sphere import HeunParameters, heun_Q

settings.register_profile("qdlab", deadline=None, max_examples=25, derandomize=True)
settings.load_profile("qdlab")

FLAGSHIP_T = 0.31 + 0.27j


@pytest.fixture(scope="session")
def flagship():
    return HeunParameters(FLAGSHIP_T, 1.0)


@pytest.fixture(scope="session")
def flagship_Q(flagship):
    return heun_Q(flagship)


@pytest.fixture(scope="session")
def tight():
    return Tolerances(abs_tol=1e-12, rel_tol=1e-12)


@pytest.fixture(scope="session")
def flagship_cover(flagship_Q):
    return build_cover(flagship_Q)


@pytest.fixture(scope="session")
def flagship_basis(flagship_cover, tight):
    return homology_cycles(flagship_cover, tol=tight)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
