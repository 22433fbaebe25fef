import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qdlab.contour import Tolerances
from qdlab.cover import (
    CoverCycle,
    agm,
    all_periods,
    build_cover,
    cover_intersection,
    ellipk,
    elliptic_oracle,
    flat_coordinate,
    homology_cycles,
    period,
    second_kind_periods,
    tau_pairing,
    tau_pairing_residue_value,
)
from qdlab.loops import stadium
from qdlab.sphere import HeunParameters, chart_quaddiff

# mpmath (30 digits): 4 K(m) / sqrt(q - r) for the cuts [0, t] and [1, t] at t = 0.31 + 0.27i
A_ORACLE = 6.750155076826474 + 0.6074579549944508j
B_ORACLE = -1.2391930779054525 - 7.712839070196447j


@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9))
def test_ellipk_matches_mpmath(a, b):
    m = complex(a, b)
    mpmath.mp.dps = 25
    assert abs(ellipk(m) - complex(mpmath.ellipk(mpmath.mpc(a, b)))) < 1e-13


def test_agm_of_real_pair():
    assert agm(1, math.sqrt(2)) == pytest.approx(float(mpmath.agm(1, mpmath.sqrt(2))), rel=1e-15)


def test_elliptic_oracle_against_mpmath():
    A, B = elliptic_oracle(0.31 + 0.27j)
    assert abs(A - A_ORACLE) < 1e-13 * abs(A_ORACLE)
    assert min(abs(B - B_ORACLE), abs(B + B_ORACLE)) < 1e-13 * abs(B_ORACLE)


def test_cover_of_flagship(flagship_cover):
    assert flagship_cover.genus == 1
    assert len(flagship_cover.finite_branch_points) == 3


def test_basis_is_symplectic(flagship_basis):
    assert np.array_equal(flagship_basis.intersection, np.array([[0, 1], [-1, 0]]))


def test_flagship_periods_match_oracle(flagship_cover, flagship_basis, tight):
    P = all_periods(flagship_cover, flagship_basis, tight)
    assert abs(P.A[0] - A_ORACLE) < 1e-10 * abs(A_ORACLE)
    assert min(abs(P.B[0] - B_ORACLE), abs(P.B[0] + B_ORACLE)) < 1e-10 * abs(B_ORACLE)


def test_reversed_cycle_negates_period(flagship_cover, flagship_basis, tight):
    a = flagship_basis.a[0]
    assert abs(period(flagship_cover, a.reversed(), tight) + period(flagship_cover, a, tight)) < 1e-10


def test_other_sheet_negates_period(flagship_cover, flagship_basis, tight):
    a = flagship_basis.a[0]
    other = CoverCycle(a.path, -a.w0, "a1-")
    assert abs(period(flagship_cover, other, tight) + period(flagship_cover, a, tight)) < 1e-10


@settings(max_examples=6)
@given(scale=st.floats(0.3, 1.0))
def test_period_is_homotopy_invariant(scale, flagship_cover, flagship_basis, tight):
    a = flagship_basis.a[0]
    ref = period(flagship_cover, a, tight)
    r = min(abs(a.path.start), abs(a.path.start - (0.31 + 0.27j)))
    path = stadium(0j, 0.31 + 0.27j, scale * r)
    if path.winding_number(0j) != a.path.winding_number(0j):
        path = path.reversed()
    val = period(flagship_cover, CoverCycle(path, flagship_cover.w_principal(path.start)), tight)
    assert min(abs(val - ref), abs(val + ref)) < 1e-9 * abs(ref)


def test_sqrt_mu_scaling(flagship_basis, tight):
    from qdlab.variational import _periods_at

    P1 = _periods_at(HeunParameters(0.31 + 0.27j, 1.0), flagship_basis, tight)
    P9 = _periods_at(HeunParameters(0.31 + 0.27j, 9.0), flagship_basis, tight)
    assert np.max(np.abs(P9 - 3 * P1)) < 1e-10 * np.max(np.abs(P1))


def test_flat_coordinate_changes_sign_with_sheet(flagship_cover):
    z1, w1 = flat_coordinate(flagship_cover, 0.5 + 0.5j, basepoint=0j)
    z2, w2 = flat_coordinate(flagship_cover, 0.5 + 0.5j, basepoint=0j, sheet=-1)
    assert abs(z1 + z2) < 1e-12 and abs(w1 + w2) < 1e-12
    assert abs(w1 * w1 - flagship_cover.w_principal(0.5 + 0.5j) ** 2) < 1e-10


def test_tau_pairing_residue_value_genus_one(flagship_cover, flagship_basis, tight):
    tau = tau_pairing(all_periods(flagship_cover, flagship_basis, tight),
                      second_kind_periods(flagship_cover, flagship_basis, tight))
    assert abs(tau - tau_pairing_residue_value(4, 0)) < 1e-8
    assert abs(tau + 6j * math.pi) < 1e-8


def test_genus_two_cover_and_tau():
    Q = chart_quaddiff([1.0 + 0.3j, 0.7 - 0.2j], [cmath.log(-0.8 + 0.9j), cmath.log(2.1 - 0.7j)])
    cover = build_cover(Q)
    tol = Tolerances(1e-12, 1e-12)
    basis = homology_cycles(cover, tol=tol)
    assert cover.genus == 2
    J = np.zeros((4, 4), dtype=int)
    J[:2, 2:], J[2:, :2] = np.eye(2), -np.eye(2)
    assert np.array_equal(basis.intersection, J)
    tau = tau_pairing(all_periods(cover, basis, tol), second_kind_periods(cover, basis, tol))
    assert abs(tau - tau_pairing_residue_value(5, 1)) < 1e-8


def test_cover_intersection_antisymmetric(flagship_cover, flagship_basis, tight):
    a, b = flagship_basis.a[0], flagship_basis.b[0]
    assert cover_intersection(flagship_cover, a, b, tight) == -cover_intersection(flagship_cover, b, a, tight) == 1
