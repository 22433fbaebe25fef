import numpy as np
import pytest
from sklearn.base import clone

from qdlab.estimators import KappaEstimator, PeriodTransformer, TraceTransformer, as_parameters
from qdlab.variational import _periods_at

X = np.array([[0.31 + 0.27j, 1.0], [0.32 + 0.26j, 1.05 + 0.02j]])


def test_as_parameters_accepts_real_columns():
    R = np.column_stack([X[:, 0].real, X[:, 0].imag, X[:, 1].real, X[:, 1].imag])
    assert as_parameters(R) == as_parameters(X)
    with pytest.raises(ValueError):
        as_parameters(np.zeros((2, 3)))


def test_clone_and_params():
    est = PeriodTransformer(tol=1e-10)
    assert clone(est).get_params() == {"tol": 1e-10}
    assert KappaEstimator().get_params() == {"step": 1e-3, "tol": 1e-12}


def test_period_transformer(tight):
    pt = PeriodTransformer().fit(X)
    Z = pt.transform(X)
    assert Z.shape == (2, 4)
    P = _periods_at(as_parameters(X)[0], pt.basis_, tight)
    assert np.allclose(Z[0, 0::2] + 1j * Z[0, 1::2], P, rtol=1e-12)


def test_trace_transformer():
    tt = TraceTransformer().fit(X[:1])
    Z = tt.transform(X[:1])
    assert Z.shape == (1, 6) and len(tt.labels_) == 3
    assert abs(Z[0, 4] + 0.9226305695021313) < 1e-8


def test_unfitted_raises():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        PeriodTransformer().transform(X)


@pytest.mark.slow
def test_kappa_estimator():
    est = KappaEstimator().fit(X[:1])
    assert abs(est.kappa_ + 2) < 1e-8
    assert est.score() <= 0
