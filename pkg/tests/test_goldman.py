import pytest

from qdlab.goldman import (
    default_pair_suite,
    goldman_rhs,
    intersections,
    poisson_lhs_tm,
    resolve,
    trace_gradient,
    trace_gradient_fd,
)
from qdlab.loops import sausage


@pytest.fixture(scope="module")
def suite(flagship):
    return default_pair_suite(flagship)


def test_suite_pairs_cross_evenly(suite):
    pairs, cal = suite
    assert "two-crossing" in pairs[cal][0]
    for label, a, b in pairs:
        n = len(intersections(a.path, b.path))
        assert n % 2 == 0
        assert (n == 0) == label.startswith("disjoint")


def test_resolved_loops_are_closed(suite):
    pairs, cal = suite
    _, a, b = pairs[cal]
    for p in intersections(a.path, b.path):
        r = resolve(a.path, b.path, p)
        for loop in (r.loop_plus, r.loop_minus):
            assert abs(loop.start - loop.end) < 1e-12
            assert abs(loop.start - p.point) < 1e-9


def test_disjoint_pair_has_zero_bracket(suite, flagship, flagship_Q, tight):
    pairs, _ = suite
    _, a, b = pairs[0]
    assert goldman_rhs(flagship_Q, a.path, b.path, tol=tight) == 0
    assert abs(poisson_lhs_tm(flagship, a.path, b.path, tight)) < 1e-10


def test_trace_gradient_matches_fd(flagship, tight):
    loop = sausage([0j, 0.31 + 0.27j], 0.12)
    _, ft, fm = trace_gradient(flagship, loop, tight)
    gt, gm = trace_gradient_fd(flagship, loop)
    assert abs(ft - gt) < 1e-7 * abs(gt)
    assert abs(fm - gm) < 1e-7 * abs(gm)


@pytest.mark.slow
def test_two_crossing_ratio_is_one_half(suite, flagship, flagship_Q, tight):
    # measured regression: the trace-gradient bracket is half the resolution sum
    pairs, cal = suite
    _, a, b = pairs[cal]
    lhs = poisson_lhs_tm(flagship, a.path, b.path, tight)
    rhs = goldman_rhs(flagship_Q, a.path, b.path, tol=tight)
    assert min(abs(lhs / rhs - 0.5), abs(lhs / rhs + 0.5)) < 1e-8


def test_bracket_is_antisymmetric(suite, flagship_Q, tight):
    pairs, cal = suite
    _, a, b = pairs[cal]
    ab = goldman_rhs(flagship_Q, a.path, b.path, tol=tight)
    ba = goldman_rhs(flagship_Q, b.path, a.path, tol=tight)
    assert abs(ab + ba) < 1e-8 * abs(ab)


def test_rhs_invariant_under_reparametrization(suite, flagship_Q, tight):
    pairs, cal = suite
    _, a, b = pairs[cal]
    ref = goldman_rhs(flagship_Q, a.path, b.path, tol=tight)
    moved = goldman_rhs(flagship_Q, a.path.rotated(1, 0.3), b.path.rotated(2, 0.6), tol=tight)
    assert abs(moved - ref) < 1e-6
