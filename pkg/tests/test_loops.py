
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdlab.contour import circle, polyline
from qdlab.loops import TangentialIntersection, crossings, sausage, stadium, subpath


def test_stadium_encloses_both_foci():
    s = stadium(0j, 1 + 0j, 0.2)
    assert s.closed
    assert s.winding_number(0j) == s.winding_number(1 + 0j) != 0
    assert s.winding_number(2 + 0j) == 0


def test_sausage_keeps_distance():
    from qdlab.contour import min_distance

    pts = [0j, 1 + 0j, 1 + 1j]
    s = sausage(pts, 0.1)
    assert 0.098 < min_distance(s, pts) <= 0.1 + 1e-12
    assert all(s.winding_number(p) != 0 for p in pts)


def test_two_circles_cross_twice_with_opposite_signs():
    c = crossings(circle(0j, 1.0), circle(1 + 0j, 1.0))
    assert len(c) == 2
    assert sorted(d.nu for d in c) == [-1, 1]
    for d in c:
        assert abs(abs(d.point) - 1) < 1e-12 and abs(abs(d.point - 1) - 1) < 1e-12


def test_disjoint_circles_do_not_cross():
    assert crossings(circle(0j, 1.0), circle(5 + 0j, 1.0)) == []


def test_tangent_circles_rejected():
    with pytest.raises(TangentialIntersection):
        crossings(circle(0j, 1.0), circle(1.999 + 0j, 1.0))


@given(st.floats(-1.5, 1.5), st.floats(-1.5, 1.5), st.floats(0.3, 1.2))
def test_closed_curves_cross_an_even_number_of_times(cx, cy, r):
    try:
        c = crossings(circle(0j, 1.0), circle(complex(cx, cy), r))
    except TangentialIntersection:
        return
    assert len(c) % 2 == 0
    assert sum(d.nu for d in c) == 0


def test_subpath_ends_at_location():
    p = polyline([0, 1, 1 + 1j])
    sub = subpath(p, (1, 0.5))
    assert abs(sub.end - (1 + 0.5j)) < 1e-14
    assert sub.length == pytest.approx(1.5)
    assert subpath(p, (0, 0.0)) is None
