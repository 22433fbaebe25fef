import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdlab.contour import Tolerances
from qdlab.sphere import HeunParameters, heun_Q
from qdlab.symplectic import (
    ChartPoint,
    chart_from_heun,
    check_form_equality,
    check_potential,
    period_jacobian,
    standard_form,
)


def test_standard_form():
    J = standard_form(2)
    assert np.array_equal(J, -J.T)
    assert np.allclose(J @ J, -np.eye(4))


@given(st.floats(0.2, 0.8), st.floats(0.1, 0.6), st.floats(0.3, 2.0), st.floats(-1, 1))
def test_heun_chart_reproduces_quaddiff(tr, ti, mr, mi):
    p = HeunParameters(complex(tr, ti), complex(mr, mi))
    chart = chart_from_heun(p)
    assert abs(cmath.exp(chart.q[0]) - p.t) < 1e-14
    Qc, Qh = chart.quaddiff(), heun_Q(p)
    for x in (0.3 + 0.9j, -0.7 + 0.2j, 1.5 - 0.4j):
        assert abs(Qc(x) - Qh(x)) < 1e-11 * abs(Qh(x))


def test_chart_vector_roundtrip():
    c = ChartPoint((1 + 0.3j, 0.7 - 0.2j), (0.1j, -0.4 + 0.2j))
    assert ChartPoint.from_vector(c.vector) == c
    assert c.n == 5


def test_chart_rejects_mismatched_lengths():
    with pytest.raises(ValueError):
        ChartPoint((1.0,), (0.1, 0.2))


@pytest.fixture(scope="module")
def flagship_jac(flagship):
    return period_jacobian(chart_from_heun(flagship), 1e-3, Tolerances(1e-12, 1e-12))


@pytest.mark.slow
def test_form_equality_with_kappa_minus_two(flagship_jac):
    f = check_form_equality(flagship_jac)
    assert f.residual < 1e-8
    assert abs(f.kappa + 2) < 1e-8


@pytest.mark.slow
def test_potential_matches_with_sign_minus_one(flagship_jac):
    out = check_potential(flagship_jac)
    assert out["sign"] == -1
    assert out["max_residual"] < 1e-8
