"""scikit-learn style wrappers around the period and monodromy engines.

Rows of ``X`` are parameter points (t, mu): either two complex columns or
four real columns (Re t, Im t, Re mu, Im mu).  Outputs are real, with real
and imaginary parts in adjacent columns.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .contour import Tolerances
from .cover import build_cover, homology_cycles
from .monodromy import SchroedingerData, keyhole_loops, phi_transfer
from .sphere import HeunParameters, heun_Q
from .symplectic import chart_from_heun, check_form_equality
from .symplectic import period_jacobian as chart_jacobian
from .variational import _periods_at

__all__ = ["PeriodTransformer", "TraceTransformer", "KappaEstimator", "as_parameters"]


def as_parameters(X) -> list[HeunParameters]:
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError("X must be two-dimensional")
    if np.iscomplexobj(X) and X.shape[1] == 2:
        return [HeunParameters(t, mu) for t, mu in X]
    if X.shape[1] == 4:
        X = X.astype(float)
        return [HeunParameters(complex(a, b), complex(c, d)) for a, b, c, d in X]
    raise ValueError("X needs two complex or four real columns (t, mu)")


def _split(Z: np.ndarray) -> np.ndarray:
    out = np.empty((Z.shape[0], 2 * Z.shape[1]))
    out[:, 0::2] = Z.real
    out[:, 1::2] = Z.imag
    return out


def _reference(points: list[HeunParameters]) -> HeunParameters:
    return HeunParameters(np.mean([p.t for p in points]), np.mean([p.mu for p in points]))


class PeriodTransformer(BaseEstimator, TransformerMixin):
    """(t, mu) -> periods (A, B) on a homology basis frozen at ``fit``.

    ``fit`` builds the basis at the mean parameter point; ``transform``
    integrates the same cycles, so nearby rows stay on one branch.
    """

    def __init__(self, tol: float = 1e-12):
        self.tol = tol

    def fit(self, X, y=None):
        ref = _reference(as_parameters(X))
        tol = Tolerances(abs_tol=self.tol, rel_tol=self.tol)
        self.basis_ = homology_cycles(build_cover(heun_Q(ref)), tol=tol)
        self.reference_ = ref
        self.n_features_in_ = np.asarray(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "basis_")
        tol = Tolerances(abs_tol=self.tol, rel_tol=self.tol)
        P = np.array([_periods_at(p, self.basis_, tol) for p in as_parameters(X)])
        return _split(P)


class TraceTransformer(BaseEstimator, TransformerMixin):
    """(t, mu) -> traces of products of two keyhole monodromies, loops frozen at ``fit``."""

    def __init__(self, tol: float = 1e-12):
        self.tol = tol

    def fit(self, X, y=None):
        ref = _reference(as_parameters(X))
        self.basepoint_, loops = keyhole_loops(heun_Q(ref).base.punctures)
        self.loops_ = [L for L in loops if L.label != "inf"]
        self.labels_ = [f"{a.label}*{b.label}" for i, a in enumerate(self.loops_) for b in self.loops_[i + 1:]]
        self.n_features_in_ = np.asarray(X).shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "loops_")
        tol = Tolerances(abs_tol=self.tol, rel_tol=self.tol)
        rows = []
        for p in as_parameters(X):
            data = SchroedingerData(heun_Q(p))
            mats = [phi_transfer(data, L.path, tol) for L in self.loops_]
            rows.append([np.trace(b @ a) for i, a in enumerate(mats) for b in mats[i + 1:]])
        return _split(np.asarray(rows))


class KappaEstimator(BaseEstimator):
    """Fits the symplectic normalisation kappa_norm over a set of (t, mu) points.

    ``kappas_`` holds the per-point fits, ``kappa_`` their mean and
    ``spread_`` the largest deviation from it.
    """

    def __init__(self, step: float = 1e-3, tol: float = 1e-12):
        self.step = step
        self.tol = tol

    def fit(self, X, y=None):
        tol = Tolerances(abs_tol=self.tol, rel_tol=self.tol)
        ks = []
        for p in as_parameters(X):
            jac = chart_jacobian(chart_from_heun(p), self.step, tol)
            ks.append(check_form_equality(jac).kappa)
        self.kappas_ = np.asarray(ks)
        self.kappa_ = complex(np.mean(self.kappas_))
        self.spread_ = float(np.max(np.abs(self.kappas_ - self.kappa_)))
        self.n_features_in_ = np.asarray(X).shape[1]
        return self

    def score(self, X=None, y=None) -> float:
        check_is_fitted(self, "kappa_")
        return -self.spread_
