
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdlab.contour import Tolerances, circle
from qdlab.monodromy import (
    SchroedingerData,
    choose_basepoint,
    keyhole_loops,
    monodromy_and_derivatives,
    phi_transfer,
    psi_monodromy,
    puncture_monodromies,
    schwarzian_of_ratio,
    third_order_residual,
)
from qdlab.sphere import HeunParameters, heun_Q

# scipy DOP853 (rtol 1e-13) on the distance-rule keyholes at t = 0.31 + 0.27i, mu = 1
ORACLE_TRACES = {
    (0, 1): -193.80866760691418 + 1174.3557362829022j,
    (0, 2): -687.7166121070356 + 174.50628690066128j,
    (1, 2): -0.9226305695021313 + 0.9814746263166514j,
}
ORACLE_M0 = np.array([
    [-28.07281779994626 - 50.909021222730324j, 29.741160784129637 + 5.344432099713758j],
    [39.560498441516934 - 106.63893778510509j, 30.072817799946296 + 50.90902122273083j],
])
DISTANCE_BASEPOINT = 0.5297444673449568 - 0.6169960873055359j


@pytest.fixture(scope="module")
def keyholes(flagship_Q):
    return keyhole_loops(flagship_Q.base.punctures)


@pytest.fixture(scope="module")
def keyhole_mats(flagship_Q, keyholes, tight):
    data = SchroedingerData(flagship_Q)
    return [phi_transfer(data, L.path, tight) for L in keyholes[1]]


def test_distance_basepoint_and_order(keyholes):
    x0, loops = keyholes
    assert abs(x0 - DISTANCE_BASEPOINT) < 1e-14
    assert [L.label for L in loops] == ["1", "0.31+0.27i", "0", "inf"]


def test_keyhole_matrices_match_scipy_oracle(keyhole_mats):
    M0 = keyhole_mats[2]
    assert np.max(np.abs(M0 - ORACLE_M0)) < 1e-10 * np.max(np.abs(ORACLE_M0))
    for (i, j), ref in ORACLE_TRACES.items():
        tr = np.trace(keyhole_mats[j] @ keyhole_mats[i])
        assert abs(tr - ref) < 1e-10 * max(abs(ref), 1.0)


def test_product_relation_distance_rule(keyhole_mats):
    P = np.eye(2)
    for M in keyhole_mats:
        P = M @ P
    scale = np.prod([np.linalg.norm(M, 2) for M in keyhole_mats])
    assert np.max(np.abs(P - np.eye(2))) < 100 * np.finfo(float).eps * scale


def test_puncture_monodromies_flagship(flagship_Q, tight):
    rep = puncture_monodromies(SchroedingerData(flagship_Q), tol=tight)
    assert rep.product_residual < 1e-7
    assert max(rep.det_residuals) < 1e-8
    assert max(rep.trace_residuals) < 1e-7
    assert rep.order[-1] == "inf"


def test_traces_stable_under_small_basepoint_shift(flagship_Q, keyhole_mats, tight):
    _, loops = keyhole_loops(flagship_Q.base.punctures, DISTANCE_BASEPOINT + 0.02j)
    data = SchroedingerData(flagship_Q)
    mats = [phi_transfer(data, L.path, tight) for L in loops]
    for (i, j), ref in ORACLE_TRACES.items():
        assert abs(np.trace(mats[j] @ mats[i]) - ref) < 1e-9 * max(abs(ref), 1.0)


def test_zero_differential_gives_identity(tight):
    rep = puncture_monodromies(SchroedingerData(heun_Q(HeunParameters(0.31 + 0.27j, 0.0))), tol=tight)
    for M in rep.matrices:
        assert np.max(np.abs(M - np.eye(2))) < 1e-12


def test_choose_basepoint_is_admissible():
    x0 = choose_basepoint([0j, 1 + 0j, 0.31 + 0.27j])
    assert min(abs(x0 - y) for y in (0, 1, 0.31 + 0.27j)) > 0.1


@settings(max_examples=10)
@given(st.floats(0.2, 0.8), st.floats(0.15, 0.6), st.floats(0.3, 2.0), st.floats(-1, 1))
def test_transfer_is_unimodular(tr, ti, mr, mi):
    Q = heun_Q(HeunParameters(complex(tr, ti), complex(mr, mi)))
    M = phi_transfer(SchroedingerData(Q), circle(complex(tr, ti), 0.1), Tolerances(1e-11, 1e-11))
    assert abs(np.linalg.det(M) - 1) < 1e-8


def test_transfer_composition(flagship_Q, tight):
    data = SchroedingerData(flagship_Q)
    c = circle(0j, 0.1)
    M1 = phi_transfer(data, c, tight)
    assert np.max(np.abs(phi_transfer(data, c.reversed(), tight) @ M1 - np.eye(2))) < 1e-9


def test_variational_monodromy_matches_plain(flagship, keyholes, keyhole_mats, tight):
    M, dt, dmu = monodromy_and_derivatives(flagship, keyholes[1][2].path, tight)
    assert np.max(np.abs(M - keyhole_mats[2])) < 1e-9 * np.max(np.abs(M))
    h = 1e-5
    Mp = monodromy_and_derivatives(HeunParameters(flagship.t, 1 + h), keyholes[1][2].path, tight)[0]
    Mm = monodromy_and_derivatives(HeunParameters(flagship.t, 1 - h), keyholes[1][2].path, tight)[0]
    assert np.max(np.abs((Mp - Mm) / (2 * h) - dmu)) < 1e-5 * np.max(np.abs(dmu))


def test_psi_gauge_relation(flagship_Q, tight):
    out = psi_monodromy(SchroedingerData(flagship_Q), circle(0.31 + 0.27j, 0.1, start_angle=1.0), tight)
    assert out["gauge_residual"] < 1e-7 * max(1.0, np.max(np.abs(out["M_psi"])))
    assert out["sheet_flip"]


def test_third_order_equation(flagship_Q):
    res = third_order_residual(flagship_Q, 0.5 + 0.5j, 1.0, h=0.01)
    wrong = third_order_residual(flagship_Q, 0.5 + 0.5j, 1.0, h=0.01, sign=-1)
    assert res["relative"] < 1e-6
    assert wrong["relative"] > 1e-3


def test_schwarzian_constant_is_two(flagship_Q):
    out = schwarzian_of_ratio(flagship_Q, 0.5 + 0.5j)
    assert out["c"] == 2
