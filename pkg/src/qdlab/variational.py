"""Dependence of the potential and of monodromies on the periods (A, B).

Two evaluation routes are kept side by side:

* constrained finite differences: move (t, mu) so that one period changes,
  keep the flat coordinate z of the probe point (or basepoint) fixed and
  difference the quantity;
* the contour formulas, integrating ``h(x, t) v(t) = dt / ((x - t)^4 Q(x) v(t))``
  over the dual cycle.

The formulas depend on the homology class of the dual cycle in the cover
punctured at x and its involution image; any discrepancy between the two
routes is reported together with its size in units of the residue at x.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .contour import ContourPath, PathSegment, Tolerances, integrate_path, min_distance
from .cover import (
    CanonicalCover,
    CoverCycle,
    HomologyBasis,
    build_cover,
    flat_coordinate,
    homology_cycles,
    integrate_on_cover,
    _start_w,
    period,
)
from .fd import richardson
from .monodromy import SchroedingerData, _gauge, monodromy_and_derivatives
from .sphere import HeunParameters, QuadDiff, heun_Q, potential_u

__all__ = [
    "PeriodJacobian",
    "period_jacobian",
    "period_jacobian_analytic",
    "DualQuadrature",
    "dual_quadrature",
    "du_dperiod",
    "du_dperiod_fd",
    "residue_at_probe",
    "dM_dperiod",
    "dM_dperiod_fd",
    "psi_monodromy_at_fixed_z",
    "dMpsi_dperiod_direct",
    "PathClassError",
    "residue_density",
    "path_class_index",
    "dMpsi_dperiod_fd",
    "VariationalRow",
    "parallel_loop",
    "variational_table",
]

_PREF = -3 / (8j * math.pi)


# --------------------------------------------------------------------------
# period Jacobian in the (t, mu) chart
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PeriodJacobian:
    """J[k, j] = d P_k / d theta_j with P = (A_1..A_g, B_1..B_g) and theta = (t, mu)."""

    params: HeunParameters
    basis: HomologyBasis = field(repr=False)
    periods: np.ndarray
    J: np.ndarray
    error_estimate: float

    def inverse(self) -> np.ndarray:
        """d theta / d P, rows (t, mu)."""
        return np.linalg.inv(self.J)


def _periods_at(params: HeunParameters, basis: HomologyBasis, tol, meshes=None, records=None) -> np.ndarray:
    Q = heun_Q(params)
    cover = build_cover(Q)
    out = []
    for k, c in enumerate(basis.cycles):
        cyc = CoverCycle(c.path, _start_w(Q, c.path.start, c.w0), c.label)
        out.append(period(cover, cyc, tol,
                          mesh=None if meshes is None else meshes[k],
                          record=None if records is None else records[k]))
    return np.asarray(out)


def period_jacobian(params: HeunParameters, basis: HomologyBasis | None = None, tol: Tolerances | None = None,
                    h: float = 1e-3) -> PeriodJacobian:
    """Richardson differences of the periods in t on a frozen mesh; the mu column is P / (2 mu)."""
    if params.mu == 0:
        raise ValueError("the period map is degenerate at mu = 0")
    tol = tol or Tolerances(abs_tol=1e-12, rel_tol=1e-12)
    basis = basis or homology_cycles(build_cover(heun_Q(params)), tol=tol)
    records = [[] for _ in basis.cycles]
    P0 = _periods_at(params, basis, tol, records=records)
    r = richardson(lambda t: _periods_at(HeunParameters(t, params.mu), basis, tol, meshes=records), params.t, h)
    J = np.column_stack([r.value, P0 / (2 * params.mu)])
    if abs(np.linalg.det(J)) < 1e-12 * np.max(np.abs(J)) ** 2:
        raise np.linalg.LinAlgError("singular period Jacobian")
    return PeriodJacobian(params, basis, P0, J, r.error_estimate)


def period_jacobian_analytic(params: HeunParameters, basis: HomologyBasis, tol: Tolerances | None = None) -> np.ndarray:
    """d v / d t = v / (2 (x - t)) integrated over the fixed cycles."""
    Q = heun_Q(params)
    tol = tol or Tolerances(abs_tol=1e-12, rel_tol=1e-12)
    t = params.t
    rows = []
    for c in basis.cycles:
        y = integrate_on_cover(Q, c.path, c.w0, [lambda x, w, v: v, lambda x, w, v: v / (2 * (x - t))], tol)
        rows.append((y[2], y[1] / (2 * params.mu)))
    return np.asarray(rows)


def _theta_step(pj: PeriodJacobian, index: int, eps: complex) -> HeunParameters:
    d = pj.inverse()[:, index] * eps
    return HeunParameters(pj.params.t + d[0], pj.params.mu + d[1])


# --------------------------------------------------------------------------
# dual-cycle quadrature
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DualQuadrature:
    """Gauss-Legendre nodes on a sheet-tracked cycle: sum_k weights[k] f(nodes[k]) ~ integral of f dx / v."""

    nodes: np.ndarray
    weights: np.ndarray
    sign: int


def dual_quadrature(Q: QuadDiff, cycle: CoverCycle, sign: int = 1, order: int = 48, pieces: int = 8) -> DualQuadrature:
    g, w = np.polynomial.legendre.leggauss(order)
    s_nodes = 0.5 * (g + 1)
    cover = build_cover(Q)
    xs, wx = [], []
    for seg in cycle.path.segments:
        for p in range(pieces):
            s = (p + s_nodes) / pieces
            xs.append(seg.point(s))
            wx.append(seg.velocity(s) * 0.5 * w / pieces)
    xs = np.concatenate(xs)
    wx = np.concatenate(wx)
    wv = np.empty(len(xs), dtype=complex)
    prev = cycle.w0
    # follow the determination of w along the dense nodes
    for k, x in enumerate(xs):
        cand = cover.w_principal(x)
        wv[k] = cand if abs(cand - prev) <= abs(cand + prev) else -cand
        prev = wv[k]
    D = np.ones(len(xs), dtype=complex)
    for y in Q.base.finite:
        D *= xs - y
    v = wv / D
    if abs(prev - cycle.w0) > abs(prev + cycle.w0):
        raise ValueError("quadrature lift does not close")
    return DualQuadrature(xs, sign * wx / v, sign)


def _dual_integral(quad: DualQuadrature, x: complex, Qx: complex) -> complex:
    return complex(np.sum(quad.weights / (x - quad.nodes) ** 4)) / Qx


# --------------------------------------------------------------------------
# potential
# --------------------------------------------------------------------------


def du_dperiod(Q: QuadDiff, basis: HomologyBasis, index: int, x: complex, w_x: complex | None = None,
               basepoint: complex = 0j, dual_factor: float = 2.0, raw: bool = False,
               quad: DualQuadrature | None = None) -> complex:
    """du/dP at fixed z(x) from -3/(8 pi i) times the integral of h(x, t) v(t) over the dual cycle.

    ``dual_factor`` converts to integer-basis duals.  Unless ``raw``, the
    dual integral is shifted by k residues at x, k being the signed crossing
    count of the straight z-path from ``basepoint`` with the dual cycle.
    """
    x = complex(x)
    if quad is None:
        sign, cyc = basis.duals()[index]
        quad = dual_quadrature(Q, cyc, sign)
    val = _dual_integral(quad, x, Q(x))
    if not raw:
        cover = build_cover(Q)
        if w_x is None:
            _, w_x = flat_coordinate(cover, x, basepoint=basepoint)
        k = path_class_index(cover, basis, index, x, basepoint)
        if k:
            val += k * 2j * math.pi * residue_density(Q, x, cover.v(x, w_x))
    return dual_factor * _PREF * val


def residue_at_probe(Q: QuadDiff, x: complex, w_x: complex, radius: float | None = None, nodes: int = 256) -> complex:
    """Residue of h(x, t) v(t) at t = x on the sheet carrying ``w_x`` (trapezoid rule on a circle)."""
    cover = build_cover(Q)
    x = complex(x)
    if radius is None:
        radius = 0.5 * min(abs(x - e) for e in cover.finite_branch_points)
    th = 2 * np.pi * np.arange(nodes) / nodes
    ts = x + radius * np.exp(1j * th)
    prev = w_x
    ws = np.empty(nodes, dtype=complex)
    for k, t in enumerate(ts):
        c = cover.w_principal(t)
        ws[k] = c if abs(c - prev) <= abs(c + prev) else -c
        prev = ws[k]
    D = np.ones(nodes, dtype=complex)
    for y in Q.base.finite:
        D *= ts - y
    v = ws / D
    f = 1 / ((x - ts) ** 4 * Q(x) * v)
    # dt = i (t - x) dtheta
    return complex(np.mean(f * (ts - x)))


def _relocate(cover: CanonicalCover, z_target: complex, x_guess: complex, basepoint: complex, tol) -> complex:
    x = complex(x_guess)
    for _ in range(30):
        z, w = flat_coordinate(cover, x, basepoint=basepoint, tol=tol)
        dx = (z_target - z) / cover.v(x, w)
        x += dx
        if abs(dx) < 1e-14 * max(1.0, abs(x)):
            break
    return x


def du_dperiod_fd(params: HeunParameters, pj: PeriodJacobian, index: int, x: complex, eps: float = 1e-4,
                  basepoint: complex = 0j, tol: Tolerances | None = None) -> complex:
    """Constrained finite difference of u at fixed z(x) (z measured from ``basepoint``)."""
    tol = tol or Tolerances(abs_tol=1e-13, rel_tol=1e-13)
    z0, _ = flat_coordinate(build_cover(heun_Q(params)), x, basepoint=basepoint, tol=tol)

    def u_at(e):
        p = _theta_step(pj, index, e)
        Q = heun_Q(p)
        xp = _relocate(build_cover(Q), z0, x, basepoint, tol)
        return potential_u(Q, xp)

    return complex(richardson(u_at, 0.0, eps).value)


# --------------------------------------------------------------------------
# monodromy: Phi at fixed x0 via the chain rule
# --------------------------------------------------------------------------


def dM_dperiod(params: HeunParameters, loop: ContourPath, pj: PeriodJacobian, tol: Tolerances | None = None) -> list:
    """dM/dP_k for every period P_k, from dM/dt, dM/dmu and d(t, mu)/dP."""
    _, Mt, Mm = monodromy_and_derivatives(params, loop, tol)
    inv = pj.inverse()
    return [Mt * inv[0, k] + Mm * inv[1, k] for k in range(inv.shape[1])]


def dM_dperiod_fd(params: HeunParameters, loop: ContourPath, pj: PeriodJacobian, index: int, eps: float = 1e-5,
                  tol: Tolerances | None = None) -> np.ndarray:
    tol = tol or Tolerances(abs_tol=1e-13, rel_tol=1e-13)
    rec: list = []
    monodromy_and_derivatives(params, loop, tol, record=rec)
    f = lambda e: monodromy_and_derivatives(_theta_step(pj, index, e), loop, tol, mesh=rec)[0]
    return np.asarray(richardson(f, 0.0, eps).value)


# --------------------------------------------------------------------------
# monodromy: Psi at fixed z0
# --------------------------------------------------------------------------


def _psi_transfer(Q: QuadDiff, path: ContourPath, r0: complex, tol, F=None, mesh=None, record=None):
    """Integrate [Phi, r, K] with K' = Lambda_Psi F(x) v where Psi is normalised at path.start."""
    base = SchroedingerData(Q)._rhs()
    L0 = Q.log_derivatives(path.start)[0]
    G0inv = np.linalg.inv(_gauge(r0, L0))

    def rhs(x, y):
        out = np.zeros(9, dtype=complex)
        out[:4] = base(x, y[:4])
        r = y[4]
        L = Q.log_derivatives(x)[0]
        out[4] = r * L / 4
        if F is not None:
            Psi = _gauge(r, L) @ y[:4].reshape(2, 2) @ G0inv
            a, b = Psi[0, 0], Psi[0, 1]
            lam = np.array([-a * b, -b * b, a * a, a * b])
            out[5:] = lam * (F(x, r * r) * r * r)
        return out

    y0 = np.zeros(9, dtype=complex)
    y0[0] = y0[3] = 1
    y0[4] = r0
    sing = list(Q.base.finite) + ([] if Q.degree <= 0 else list(Q.zeros))
    y = integrate_path(rhs, y0, path, tol, singularities=sing, mesh=mesh, record=record)
    Phi = y[:4].reshape(2, 2)
    G1 = _gauge(y[4], Q.log_derivatives(path.end)[0])
    return G1 @ Phi @ G0inv, y[5:].reshape(2, 2)


def _r_on_sheet(Q: QuadDiff, x: complex, v: complex, ref: complex | None) -> complex:
    r = cmath.sqrt(v)
    if ref is not None and abs(-r - ref) < abs(r - ref):
        r = -r
    return r


def psi_monodromy_at_fixed_z(params: HeunParameters, loop: ContourPath, z0: complex, x_guess: complex,
                             r_ref: complex | None, basepoint: complex = 0j, tol: Tolerances | None = None,
                             mesh=None, record=None):
    """Psi monodromy of the loop conjugated to start at the point with flat coordinate z0."""
    tol = tol or Tolerances(abs_tol=1e-13, rel_tol=1e-13)
    Q = heun_Q(params)
    cover = build_cover(Q)
    x0 = _relocate(cover, z0, x_guess, basepoint, tol)
    _, w0 = flat_coordinate(cover, x0, basepoint=basepoint, tol=tol)
    r0 = _r_on_sheet(Q, x0, cover.v(x0, w0), r_ref)
    path = loop
    if abs(x0 - loop.start) > 0:
        path = ContourPath((PathSegment("line", x0, loop.start),) + loop.segments
                           + (PathSegment("line", loop.end, x0),), closed=True)
    M, _ = _psi_transfer(Q, path, r0, tol, mesh=mesh, record=record)
    return M, x0, r0


def residue_density(Q: QuadDiff, x: complex, v: complex) -> complex:
    """Closed form of the residue of h(x, t) v(t) at t = x: (1/v)'''(x) / (6 Q(x))."""
    L, L1, L2 = Q.log_derivatives(x)
    return (-L2 / 2 + 0.75 * L * L1 - L**3 / 8) / (6 * Q(x) * v)


def path_class_index(cover: CanonicalCover, basis: HomologyBasis, index: int, x: complex,
                     basepoint: complex = 0j, tol: Tolerances | None = None) -> int:
    """Signed, sheet-matched crossings of the straight z-path basepoint -> x with the dual cycle."""
    from .cover import _w_at
    from .loops import crossings

    sign, cyc = basis.duals()[index]
    total = 0
    for d in crossings(ContourPath((PathSegment("line", complex(basepoint), complex(x)),)), cyc.path):
        _, wz = flat_coordinate(cover, d.point, basepoint=basepoint, tol=tol)
        wc = _w_at(cover, cyc, d.loc_other, tol)
        total += d.nu * (1 if abs(wz - wc) < abs(wz + wc) else -1)
    return sign * total


class PathClassError(ValueError):
    """The loop meets the dual-cycle representative or does not close on the cover."""


def _loop_period_derivative(params: HeunParameters, loop: ContourPath, w0: complex, pj: PeriodJacobian,
                            index: int, tol) -> tuple[complex, bool]:
    Q = heun_Q(params)
    t = params.t
    y = integrate_on_cover(Q, loop, w0, [lambda x, w, v: v, lambda x, w, v: v / (2 * (x - t))], tol)
    inv = pj.inverse()
    closes = abs(y[0] - w0) <= abs(y[0] + w0)
    return y[2] * inv[0, index] + y[1] / (2 * params.mu) * inv[1, index], closes


def dMpsi_dperiod_direct(params: HeunParameters, loop: ContourPath, basis: HomologyBasis, index: int,
                         r0: complex, pj: PeriodJacobian | None = None, tol: Tolerances | None = None,
                         dual_factor: float = 2.0, basepoint: complex = 0j, raw: bool = False) -> np.ndarray:
    """M^{-1} dM/dP from the contour formula for the Psi monodromy at fixed z(x0).

    The dual integral is shifted by k0 residues at x, with k0 the path-class
    index of the basepoint, and the endpoint drift of z along the loop
    contributes M^{-1} A(x0) M dP_loop/dP.  ``raw`` drops both corrections.
    ``dual_factor`` converts the formula to integer-basis duals.
    """
    Q = heun_Q(params)
    cover = build_cover(Q)
    sign, cyc = basis.duals()[index]
    tol = tol or Tolerances(abs_tol=1e-12, rel_tol=1e-12)
    if _paths_meet(loop, cyc.path):
        raise PathClassError("loop meets the dual-cycle representative")
    quad = dual_quadrature(Q, cyc, sign)
    k0 = 0 if raw else path_class_index(cover, basis, index, loop.start, basepoint, tol)

    def F(x, v):
        val = _dual_integral(quad, x, Q(x))
        if k0:
            val += k0 * 2j * math.pi * residue_density(Q, x, v)
        return dual_factor * _PREF * val

    M, K = _psi_transfer(Q, loop, r0, tol, F=F)
    if raw:
        return K
    if pj is None:
        pj = period_jacobian(params, basis, tol)
    dP, closes = _loop_period_derivative(params, loop, r0 * r0 * cover.denominator(loop.start), pj, index, tol)
    if not closes:
        raise PathClassError("loop does not close on the cover")
    A0 = np.array([[0, 1], [potential_u(Q, loop.start), 0]], dtype=complex)
    return K + np.linalg.solve(M, A0 @ M) * dP


def _paths_meet(p1: ContourPath, p2: ContourPath) -> bool:
    from .loops import TangentialIntersection, crossings

    try:
        return bool(crossings(p1, p2))
    except TangentialIntersection:
        return True


def dMpsi_dperiod_fd(params: HeunParameters, loop: ContourPath, pj: PeriodJacobian, index: int, r0: complex,
                     eps: float = 1e-5, basepoint: complex = 0j, tol: Tolerances | None = None) -> np.ndarray:
    """M^{-1} dM/dP for the Psi monodromy at fixed z(x0), by constrained finite differences."""
    tol = tol or Tolerances(abs_tol=1e-13, rel_tol=1e-13)
    cover = build_cover(heun_Q(params))
    x0 = loop.start
    z0, _ = flat_coordinate(cover, x0, basepoint=basepoint, tol=tol)
    M0, _ = _psi_transfer(heun_Q(params), loop, r0, tol)
    f = lambda e: psi_monodromy_at_fixed_z(_theta_step(pj, index, e), loop, z0, x0, r0, basepoint, tol)[0]
    dM = np.asarray(richardson(f, 0.0, eps).value)
    return np.linalg.solve(M0, dM)


# --------------------------------------------------------------------------
# dual-pipeline tables
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class VariationalRow:
    quantity: str
    cycle: str
    direct: object
    oracle: object
    discrepancy: float
    raw_discrepancy: float | None = None
    path_class_met: bool = True

    def to_dict(self) -> dict:
        def enc(v):
            arr = np.asarray(v, dtype=complex)
            if arr.ndim == 0:
                return [float(arr.real), float(arr.imag)]
            return [[[float(c.real), float(c.imag)] for c in row] for row in arr]

        return {"quantity": self.quantity, "cycle": self.cycle, "direct": enc(self.direct),
                "oracle": enc(self.oracle), "discrepancy": self.discrepancy,
                "raw_discrepancy": self.raw_discrepancy, "path_class_met": self.path_class_met}


def _rel(a, b) -> float:
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), 1e-300))


def parallel_loop(basis: HomologyBasis, index: int) -> ContourPath:
    """A loop homologous to the dual of basis cycle ``index`` that stays off its representative."""
    from .loops import sausage

    g = basis.genus
    order = list(basis.cuts.order)
    if index >= g:
        i = index - g
        pts = order[2 * i: 2 * i + 2]
        r = min(abs(basis.a[i].path.start - p) for p in pts)
        return sausage(pts, 2.0 * r)
    pts = order[2 * index + 1: 2 * g + 1]
    r = min_distance(basis.b[index].path, pts)
    return sausage(pts, 0.6 * r)


def variational_table(params: HeunParameters, probe: complex, loop: ContourPath,
                      tol: Tolerances | None = None) -> list[VariationalRow]:
    """Direct formulas against constrained finite differences for every basis cycle.

    ``loop`` feeds the Phi chain-rule rows.  The Psi rows use, for each cycle,
    a loop parallel to its dual, which is where the contour formula applies.
    ``raw_discrepancy`` is the gap before the path-class corrections.
    """
    tol = tol or Tolerances(abs_tol=1e-12, rel_tol=1e-12)
    Q = heun_Q(params)
    cover = build_cover(Q)
    basis = homology_cycles(cover, tol=tol)
    pj = period_jacobian(params, basis, tol)
    _, w_x = flat_coordinate(cover, probe, basepoint=0j, tol=tol)
    chain = dM_dperiod(params, loop, pj, tol)
    rows = []
    for k, cyc in enumerate(basis.cycles):
        lab = cyc.label
        o = du_dperiod_fd(params, pj, k, probe)
        d = du_dperiod(Q, basis, k, probe, w_x)
        d_raw = du_dperiod(Q, basis, k, probe, raw=True)
        rows.append(VariationalRow("du/dP", lab, d, o, _rel(d, o), _rel(d_raw, o)))
        fd = dM_dperiod_fd(params, loop, pj, k)
        rows.append(VariationalRow("dM_phi/dP chain rule", lab, chain[k], fd, _rel(chain[k], fd)))
        gam = parallel_loop(basis, k)
        _, w_0 = flat_coordinate(cover, gam.start, basepoint=0j, tol=tol)
        r0 = _r_on_sheet(Q, gam.start, cover.v(gam.start, w_0), None)
        kf = dMpsi_dperiod_fd(params, gam, pj, k, r0)
        try:
            kd = dMpsi_dperiod_direct(params, gam, basis, k, r0, pj, tol)
            met = True
        except PathClassError:
            kd, met = np.full((2, 2), np.nan + 0j), False
        kd_raw = dMpsi_dperiod_direct(params, gam, basis, k, r0, pj, tol, raw=True)
        rows.append(VariationalRow("M_psi^-1 dM_psi/dP", lab, kd, kf, _rel(kd, kf), _rel(kd_raw, kf), met))
    return rows
