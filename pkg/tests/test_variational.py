import numpy as np
import pytest

from qdlab.cover import flat_coordinate
from qdlab.variational import (
    du_dperiod,
    du_dperiod_fd,
    period_jacobian,
    period_jacobian_analytic,
    residue_at_probe,
    residue_density,
)

PROBE = 0.5 + 0.5j


@pytest.fixture(scope="module")
def pj(flagship, flagship_basis, tight):
    return period_jacobian(flagship, flagship_basis, tight)


def test_period_jacobian_fd_matches_analytic(pj, flagship, flagship_basis, tight):
    Ja = period_jacobian_analytic(flagship, flagship_basis, tight)
    assert np.max(np.abs(pj.J - Ja)) < 1e-9 * np.max(np.abs(Ja))


def test_mu_column_is_half_period_over_mu(pj, flagship):
    assert np.max(np.abs(pj.J[:, 1] - pj.periods / (2 * flagship.mu))) < 1e-14


def test_residue_closed_form_matches_trapezoid(flagship_Q, flagship_cover):
    _, w = flat_coordinate(flagship_cover, PROBE, basepoint=0j)
    closed = residue_density(flagship_Q, PROBE, flagship_cover.v(PROBE, w))
    assert abs(residue_at_probe(flagship_Q, PROBE, w) - closed) < 1e-12 * abs(closed)


@pytest.mark.slow
@pytest.mark.parametrize("index", [0, 1])
def test_du_dperiod_direct_matches_fd(index, pj, flagship, flagship_Q, flagship_basis):
    direct = du_dperiod(flagship_Q, flagship_basis, index, PROBE)
    fd = du_dperiod_fd(flagship, pj, index, PROBE)
    assert abs(direct - fd) < 1e-8 * abs(fd)
