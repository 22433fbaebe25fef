import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdlab.contour import (
    ContourPath,
    MultipleRootError,
    SingularityTooClose,
    Tolerances,
    arc,
    circle,
    contour_integral,
    integrate_path,
    integrate_transfer,
    line,
    matrix_exponential,
    min_distance,
    polyline,
    polynomial_roots,
    sqrt_continuation,
)

coords = st.floats(-2, 2, allow_nan=False, allow_infinity=False)
points = st.builds(complex, coords, coords)


def test_tolerances_reject_nonpositive():
    with pytest.raises(ValueError):
        Tolerances(abs_tol=0.0)
    with pytest.raises(ValueError):
        Tolerances(rel_tol=float("nan"))


def test_tolerances_for_points_sets_clearance():
    tol = Tolerances.for_points([0, 1, 2j])
    assert tol.singularity_clearance == pytest.approx(1e-3 * abs(1 - 2j))


def test_circle_geometry():
    c = circle(1 + 1j, 0.5)
    assert c.closed
    assert c.length == pytest.approx(math.pi)
    assert c.winding_number(1 + 1j) == 1
    assert c.winding_number(3j) == 0
    assert circle(0j, 1.0, ccw=False).winding_number(0j) == -1


def test_path_roundtrip_through_dicts():
    p = polyline([0, 1, 1 + 1j], closed=True)
    q = ContourPath.from_list(p.to_list(), closed=True)
    assert q == p


def test_reversed_and_then():
    p = line(0, 1).then(line(1, 1j))
    r = p.reversed()
    assert r.start == p.end and r.end == p.start
    assert r.length == pytest.approx(p.length)


def test_rotated_keeps_closed_loop():
    c = circle(0j, 1.0)
    r = c.rotated(0, 0.25)
    assert r.closed
    assert abs(r.start - 1j) < 1e-14
    assert r.winding_number(0j) == 1


def test_min_distance_to_arc():
    a = arc(0j, 1 + 0j, math.pi / 2)
    assert min_distance(a, [2 + 0j]) == pytest.approx(1.0)
    assert min_distance(a, [-2 + 0j]) == pytest.approx(math.sqrt(5))


def test_exponential_ode_matches_closed_form():
    y = integrate_path(lambda x, y: y, np.array([1 + 0j]), line(0, 1 + 1j), Tolerances(1e-13, 1e-13))
    assert abs(y[0] - cmath.exp(1 + 1j)) < 1e-11


def test_residue_of_one_over_x():
    val = contour_integral(lambda x: 1 / x, circle(0j, 0.5), Tolerances(1e-13, 1e-13))
    assert abs(val - 2j * math.pi) < 1e-11


def test_singularity_clearance_enforced():
    with pytest.raises(SingularityTooClose):
        integrate_path(lambda x, y: y, np.array([1 + 0j]), line(-1, 1), singularities=[1e-6j])


def test_frozen_mesh_replays_bit_identically():
    rec = []
    rhs = lambda x, y: np.array([y[0] / (x - 3)])
    y1 = integrate_path(rhs, np.array([1 + 0j]), circle(0j, 1.0), record=rec)
    y2 = integrate_path(rhs, np.array([1 + 0j]), circle(0j, 1.0), mesh=rec)
    assert np.array_equal(y1, y2)


@given(points, points, st.floats(0.1, 3.0))
def test_trace_free_transfer_is_unimodular(a, b, lam):
    if abs(a - b) < 1e-3:
        return
    T = integrate_transfer(lambda x: np.array([[0, 1], [-lam * x, 0]]), line(a, b), Tolerances(1e-12, 1e-12))
    assert abs(np.linalg.det(T) - 1) < 1e-9


@given(points, points)
def test_reversed_path_inverts_transfer(a, b):
    if abs(a - b) < 1e-3:
        return
    coeff = lambda x: np.array([[0, 1], [-(1 + x * x), 0]])
    tol = Tolerances(1e-12, 1e-12)
    T = integrate_transfer(coeff, line(a, b), tol)
    R = integrate_transfer(coeff, line(b, a), tol)
    assert np.max(np.abs(R @ T - np.eye(2))) < 1e-8 * max(1.0, np.max(np.abs(T)) ** 2)


def test_constant_coefficient_transfer_is_matrix_exponential():
    A = np.array([[0.3, 1.0], [-2.0, -0.3]], dtype=complex)
    T = integrate_transfer(lambda x: A, line(0, 1.5), Tolerances(1e-13, 1e-13))
    assert np.max(np.abs(T - matrix_exponential(1.5 * A))) < 1e-11


def test_matrix_exponential_of_rotation():
    E = matrix_exponential(np.array([[0, -math.pi], [math.pi, 0]]))
    assert np.max(np.abs(E + np.eye(2))) < 1e-13


def test_polynomial_roots_and_multiplicity():
    r = sorted(polynomial_roots([1, -6, 11, -6]), key=lambda z: z.real)
    assert np.allclose(r, [1, 2, 3], atol=1e-13)
    with pytest.raises(MultipleRootError):
        polynomial_roots([1, -2, 1])


def test_sqrt_continuation_around_one_branch_point_flips_sign():
    _, sign = sqrt_continuation([0j], 1.0, circle(0j, 1.0))
    assert sign == -1
    _, sign = sqrt_continuation([0j, 0.5 + 0j], 1.0, circle(0j, 1.0))
    assert sign == 1
