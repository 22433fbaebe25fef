import cmath

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdlab.fd import central, holomorphic_derivative, richardson

coef = st.floats(-3, 3, allow_nan=False)


@given(st.lists(coef, min_size=1, max_size=5), st.floats(-1, 1), st.floats(1e-3, 0.2))
def test_richardson_exact_for_quartics(c, x0, h):
    p = np.poly1d(c)
    r = richardson(p, x0, h)
    assert abs(r.value - p.deriv()(x0)) < 1e-8 * max(1.0, np.max(np.abs(c)))


def test_central_difference_is_second_order():
    errs = [abs(central(cmath.exp, 0.3, h) - cmath.exp(0.3)) for h in (0.1, 0.05)]
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=1e-2)


def test_holomorphic_derivative_of_log():
    r = holomorphic_derivative(cmath.log, 1 + 1j, 1e-3)
    assert abs(r.value - 1 / (1 + 1j)) < 1e-10
    assert r.cr_residual < 1e-9


def test_richardson_on_vectors():
    f = lambda x: np.array([cmath.sin(x), x**3])
    r = richardson(f, 0.5, 1e-2)
    assert np.max(np.abs(r.value - np.array([cmath.cos(0.5), 0.75]))) < 1e-9
