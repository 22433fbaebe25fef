"""Canonical versus homological symplectic structure on genus-0 charts.

A chart point (p, q) describes ``Q = sum p_k Q_k`` on the sphere
(0, 1, e^{q_1}, ..., e^{q_m}, inf).  The periods (A, B) of the canonical cover
are differentiated in (p, q) with holomorphic Richardson differences on a
frozen integration mesh, and the resulting Jacobian is used to compare

* ``sum dp ^ dq`` with ``kappa sum dA ^ dB`` (kappa measured),
* ``sum p dq`` with ``sum (A dB - B dA)`` (global sign measured),
* ``d(sum A B)`` with ``2 sum A dB - sum p dq``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .contour import Tolerances
from .cover import (
    CoverCycle,
    HomologyBasis,
    _start_w,
    build_cover,
    homology_cycles,
    integrate_on_cover,
    period,
)
from .fd import richardson
from .sphere import INF, HeunParameters, QuadDiff, basis_Qk, chart_quaddiff

__all__ = [
    "ChartPoint",
    "ChartJacobian",
    "FormResidual",
    "chart_from_heun",
    "period_jacobian",
    "standard_form",
    "check_form_equality",
    "check_potential",
    "check_generating_function",
    "cotangent_pairing_check",
    "convergence_table",
]


@dataclass(frozen=True)
class ChartPoint:
    p: tuple
    q: tuple

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(complex(v) for v in self.p))
        object.__setattr__(self, "q", tuple(complex(v) for v in self.q))
        if len(self.p) != len(self.q) or not self.p:
            raise ValueError("p and q must have the same positive length")

    @property
    def dim(self) -> int:
        return len(self.p)

    @property
    def n(self) -> int:
        return self.dim + 3

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.p + self.q)

    @classmethod
    def from_vector(cls, x) -> "ChartPoint":
        m = len(x) // 2
        return cls(tuple(x[:m]), tuple(x[m:]))

    def quaddiff(self) -> QuadDiff:
        return chart_quaddiff(self.p, self.q)


def chart_from_heun(params: HeunParameters) -> ChartPoint:
    """(p, q) of mu / (x (x-1) (x-t)): t = e^q and mu = p (1 - t) / (4 pi i)."""
    t = params.t
    return ChartPoint((4j * math.pi * params.mu / (1 - t),), (cmath.log(t),))


def standard_form(g: int) -> np.ndarray:
    """[[0, I], [-I, 0]] in the ordering (A_1..A_g, B_1..B_g) or (p, q)."""
    J = np.zeros((2 * g, 2 * g), dtype=complex)
    J[:g, g:] = np.eye(g)
    J[g:, :g] = -np.eye(g)
    return J


@dataclass(frozen=True)
class ChartJacobian:
    """J[k, j] = d P_k / d x_j, P = (A, B), x = (p, q)."""

    chart: ChartPoint
    basis: HomologyBasis = field(repr=False)
    periods: np.ndarray
    J: np.ndarray
    error_estimate: float
    cr_residual: float
    step: float

    @property
    def A(self) -> np.ndarray:
        return self.periods[: self.basis.genus]

    @property
    def B(self) -> np.ndarray:
        return self.periods[self.basis.genus:]

    @property
    def condition(self) -> float:
        return float(np.linalg.cond(self.J))


def _periods(Q: QuadDiff, basis: HomologyBasis, tol, meshes=None, records=None) -> np.ndarray:
    cover = build_cover(Q)
    out = []
    for k, c in enumerate(basis.cycles):
        cyc = CoverCycle(c.path, _start_w(Q, c.path.start, c.w0), c.label)
        out.append(period(cover, cyc, tol,
                          mesh=None if meshes is None else meshes[k],
                          record=None if records is None else records[k]))
    return np.asarray(out)


def period_jacobian(chart: ChartPoint, step: float = 1e-3, tol: Tolerances | None = None,
                    basis: HomologyBasis | None = None) -> ChartJacobian:
    """Holomorphic Richardson Jacobian of the periods in (p, q) on a frozen mesh.

    Steps in p are relative to |p|; steps in q are absolute.
    """
    tol = tol or Tolerances(abs_tol=1e-12, rel_tol=1e-12)
    Q0 = chart.quaddiff()
    basis = basis or homology_cycles(build_cover(Q0), tol=tol)
    records = [[] for _ in basis.cycles]
    P0 = _periods(Q0, basis, tol, records=records)
    x0 = chart.vector
    m = chart.dim
    cols, err, cr = [], 0.0, 0.0
    for j in range(2 * m):
        h = step * max(1.0, abs(x0[j])) if j < m else step

        def f(xj, j=j):
            x = x0.copy()
            x[j] = xj
            return _periods(ChartPoint.from_vector(x).quaddiff(), basis, tol, meshes=records)

        re = richardson(f, x0[j], h)
        im = richardson(f, x0[j], 1j * h)
        scale = max(float(np.max(np.abs(re.value))), 1e-300)
        cr = max(cr, float(np.max(np.abs(re.value - im.value))) / scale)
        err = max(err, re.error_estimate, im.error_estimate)
        cols.append((re.value + im.value) / 2)
    return ChartJacobian(chart, basis, P0, np.column_stack(cols), err, cr, step)


@dataclass(frozen=True)
class FormResidual:
    jacobian: ChartJacobian = field(repr=False)
    omega_can: np.ndarray
    omega_pulled: np.ndarray
    kappa: complex
    residual: float
    residual_kappa_one: float

    def to_dict(self) -> dict:
        return {"kappa_norm": [self.kappa.real, self.kappa.imag], "residual": self.residual,
                "residual_kappa_one": self.residual_kappa_one,
                "fd_error_estimate": self.jacobian.error_estimate,
                "cauchy_riemann_residual": self.jacobian.cr_residual,
                "jacobian_condition": self.jacobian.condition}


def check_form_equality(jac: ChartJacobian) -> FormResidual:
    """Fit kappa in ||kappa J^T Omega J - Omega_can|| and report the residual."""
    g = jac.basis.genus
    S = jac.J.T @ standard_form(g) @ jac.J
    C = standard_form(jac.chart.dim)
    kappa = complex(np.vdot(S.ravel(), C.ravel()) / np.vdot(S.ravel(), S.ravel()))
    res = float(np.max(np.abs(kappa * S - C)))
    return FormResidual(jac, C, S, kappa, res, float(np.max(np.abs(S - C))))


def check_potential(jac: ChartJacobian) -> dict:
    """Residuals of sigma * sum (A dB - B dA) against sum p dq, per coordinate direction."""
    g = jac.basis.genus
    A, B = jac.A, jac.B
    JA, JB = jac.J[:g], jac.J[g:]
    theta_hom = A @ JB - B @ JA
    m = jac.chart.dim
    theta_can = np.concatenate([np.zeros(m), np.asarray(jac.chart.p)])
    best = None
    for sigma in (1, -1):
        r = sigma * theta_hom - theta_can
        if best is None or np.max(np.abs(r)) < np.max(np.abs(best[1])):
            best = (sigma, r)
    sigma, r = best
    return {"sign": sigma, "residual_p": np.abs(r[:m]).tolist(), "residual_q": np.abs(r[m:]).tolist(),
            "max_residual": float(np.max(np.abs(r)))}


def check_generating_function(jac: ChartJacobian, directions: int = 10, seed: int = 0, sign: int = 1,
                              tol: Tolerances | None = None) -> dict:
    """dG for G = sum A B along random directions, by differences of G and from the Jacobian.

    Reports the Leibniz residual |FD(dG) - sum (A dB + B dA)| and the
    generating-function residual |FD(dG) - (2 sum A dB - sign sum p dq)|.
    """
    tol = tol or Tolerances(abs_tol=1e-12, rel_tol=1e-12)
    rng = np.random.default_rng(seed)
    g = jac.basis.genus
    m = jac.chart.dim
    x0 = jac.chart.vector
    records = [[] for _ in jac.basis.cycles]
    _periods(jac.chart.quaddiff(), jac.basis, tol, records=records)
    A, B = jac.A, jac.B
    leib, gen = [], []
    for _ in range(directions):
        d = rng.normal(size=2 * m) + 1j * rng.normal(size=2 * m)
        d /= np.linalg.norm(d)

        def G(s):
            P = _periods(ChartPoint.from_vector(x0 + s * d).quaddiff(), jac.basis, tol, meshes=records)
            return complex(np.sum(P[:g] * P[g:]))

        fd = complex(richardson(G, 0.0, jac.step).value)
        dP = jac.J @ d
        dA, dB = dP[:g], dP[g:]
        leib.append(abs(fd - complex(A @ dB + B @ dA)))
        pdq = complex(np.asarray(jac.chart.p) @ d[m:])
        gen.append(abs(fd - (2 * complex(A @ dB) - sign * pdq)))
    return {"leibniz_residual": float(max(leib)), "generating_residual": float(max(gen)),
            "directions": directions, "seed": seed}


def cotangent_pairing_check(jac: ChartJacobian, tol: Tolerances | None = None) -> dict:
    """d q_k / d P_i against the integral of Q_k / v over the dual cycle s_i*.

    A single dual factor c (d q / d P = c * integral) is fitted over all
    entries and reported with the residual after the fit.
    """
    tol = tol or Tolerances(abs_tol=1e-12, rel_tol=1e-12)
    Q = jac.chart.quaddiff()
    m = jac.chart.dim
    roles = (0j, INF, 1 + 0j)
    basis_k = [basis_Qk(Q.base, roles, k) for k in range(1, m + 1)]
    inv = np.linalg.inv(jac.J)
    dq_dP = inv[m:]
    integrals = np.zeros_like(dq_dP)
    for i, (sign, cyc) in enumerate(jac.basis.duals()):
        gs = [lambda x, w, v, Qk=Qk: Qk(x) / v for Qk in basis_k]
        y = integrate_on_cover(Q, cyc.path, cyc.w0, gs, tol)
        integrals[:, i] = sign * np.asarray(y[1:])
    c = complex(np.vdot(integrals.ravel(), dq_dP.ravel()) / np.vdot(integrals.ravel(), integrals.ravel()))
    res = float(np.max(np.abs(dq_dP - c * integrals)))
    return {"dual_factor": [c.real, c.imag], "residual": res,
            "relative_residual": res / float(np.max(np.abs(dq_dP)))}


def convergence_table(chart: ChartPoint, steps=(4e-3, 2e-3, 1e-3), reference_step: float = 2.5e-4,
                      tol: Tolerances | None = None) -> list[dict]:
    """Plain central-difference Jacobian errors against a fine Richardson reference."""
    tol = tol or Tolerances(abs_tol=1e-12, rel_tol=1e-12)
    ref = period_jacobian(chart, reference_step, tol)
    Q0 = chart.quaddiff()
    records = [[] for _ in ref.basis.cycles]
    _periods(Q0, ref.basis, tol, records=records)
    x0 = chart.vector
    m = chart.dim
    rows = []
    for h0 in steps:
        cols = []
        for j in range(2 * m):
            h = h0 * max(1.0, abs(x0[j])) if j < m else h0
            xp, xm = x0.copy(), x0.copy()
            xp[j] += h
            xm[j] -= h
            fp = _periods(ChartPoint.from_vector(xp).quaddiff(), ref.basis, tol, meshes=records)
            fm = _periods(ChartPoint.from_vector(xm).quaddiff(), ref.basis, tol, meshes=records)
            cols.append((fp - fm) / (2 * h))
        err = float(np.max(np.abs(np.column_stack(cols) - ref.J)))
        rows.append({"step": h0, "error": err})
    for a, b in zip(rows[:-1], rows[1:]):
        b["order"] = math.log(a["error"] / b["error"]) / math.log(a["step"] / b["step"]) if b["error"] > 0 else math.inf
    return rows
