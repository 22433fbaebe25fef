import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdlab.sphere import (
    INF,
    HeunParameters,
    PuncturedSphere,
    QuadDiff,
    basis_Qk,
    basis_Qk_product,
    build_chart,
    chart_quaddiff,
    coordinates_q,
    cross_ratio,
    heun_Q,
    potential_u,
    potential_u_derivative,
    schwarzian_v,
)
from qdlab.symplectic import chart_from_heun

small = st.floats(-0.9, 0.9, allow_nan=False)


def test_infinity_is_a_singleton():
    import pickle

    assert pickle.loads(pickle.dumps(INF)) is INF


def test_heun_rejects_colliding_t():
    with pytest.raises(ValueError):
        HeunParameters(1 + 1e-9, 1.0)


def test_heun_Q_values(flagship_Q):
    x = 0.5 + 0.5j
    assert flagship_Q(x) == pytest.approx(1 / (x * (x - 1) * (x - (0.31 + 0.27j))))
    assert flagship_Q.pole_at_infinity()


def test_numerator_degree_limit():
    base = PuncturedSphere((0j, 1 + 0j, 2j, INF))
    with pytest.raises(ValueError):
        QuadDiff(base, (1.0, 0.0))


def test_log_derivatives_against_differences(flagship_Q):
    x, h = 0.4 - 0.3j, 1e-4
    L, L1, L2 = flagship_Q.log_derivatives(x)
    lq = lambda z: cmath.log(flagship_Q(z))
    assert abs(L - (lq(x + h) - lq(x - h)) / (2 * h)) < 1e-7
    Lf = lambda z: flagship_Q.log_derivatives(z)[0]
    assert abs(L1 - (Lf(x + h) - Lf(x - h)) / (2 * h)) < 1e-6


def test_potential_derivative_consistent(flagship_Q):
    x, h = 0.6 + 0.2j, 1e-4
    fd = (potential_u(flagship_Q, x + h) - potential_u(flagship_Q, x - h)) / (2 * h)
    assert abs(potential_u_derivative(flagship_Q, x) - fd) < 1e-6 * abs(fd)


def test_schwarzian_of_sqrt_q():
    # S_v for v = sqrt(Q), against the direct Schwarzian-type expression of log v
    Q = heun_Q(HeunParameters(0.2 + 0.7j, 2.0))
    x, h = 0.3 - 0.4j, 1e-3
    lv = lambda z: cmath.log(Q(z)) / 2
    d1 = (lv(x + h) - lv(x - h)) / (2 * h)
    d2 = (lv(x + h) - 2 * lv(x) + lv(x - h)) / h**2
    assert abs(schwarzian_v(Q, x) - (d2 - d1 * d1 / 2)) < 1e-5


def test_basis_differentials_two_routes():
    base = PuncturedSphere((0j, 1 + 0j, 0.3 + 0.4j, -1 + 2j, INF))
    roles = (0j, INF, 1 + 0j)
    for k in (1, 2):
        Qk = basis_Qk(base, roles, k)
        for x in (0.5 + 0.5j, -0.7 - 0.2j):
            assert abs(Qk(x) - basis_Qk_product(base, roles, k, x)) < 1e-12 * abs(Qk(x))


def test_cross_ratio_with_infinity():
    assert cross_ratio(2 + 0j, 0j, 1 + 0j, INF) == pytest.approx(2.0)


@given(small, small, st.floats(0.3, 2.0), st.floats(-math.pi, math.pi))
def test_chart_roundtrip_reproduces_heun(a, b, r, th):
    t = 0.5 + complex(a, b)
    if min(abs(t), abs(t - 1)) < 0.05:
        return
    params = HeunParameters(t, r * cmath.exp(1j * th))
    ch = chart_from_heun(params)
    Q1, Q2 = heun_Q(params), chart_quaddiff(ch.p, ch.q)
    for x in (0.7 + 0.9j, -0.4 + 0.1j):
        assert abs(Q1(x) - Q2(x)) < 1e-10 * abs(Q1(x))


def test_build_chart_inverts_chart_quaddiff():
    p, q = (1.0 + 0.3j, 0.7 - 0.2j), (cmath.log(-0.8 + 0.9j), cmath.log(2.1 - 0.7j))
    Q = chart_quaddiff(p, q)
    ch = build_chart(Q, roles=(0j, INF, 1 + 0j))
    assert np.allclose(ch.p, p, atol=1e-10)
    assert np.allclose(np.exp(ch.q), np.exp(q), atol=1e-12)
    assert ch.probe_residual() < 1e-10
    assert np.allclose(np.exp(coordinates_q(Q.base, (0j, INF, 1 + 0j))), np.exp(q))


def test_to_dict_roundtrip(flagship_Q):
    assert QuadDiff.from_dict(flagship_Q.to_dict()) == flagship_Q
