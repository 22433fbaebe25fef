"""Monodromy of phi'' + Q phi = 0 and of its Wronskian systems.

The primary object is the Phi-system ``dPhi/dx = [[0, 1], [-Q, 0]] Phi`` in the
x-chart.  Transfer matrices satisfy ``Phi(end) = T Phi(start)``, so for a loop
traversed first along g1 and then g2 the matrix is ``T(g2) T(g1)``.

The Psi-system is reached through the gauge

    Psi = diag(v^{1/2}, v^{-1/2}) [[1, 0], [v'/(2v), 1]] Phi,

which has unit determinant and satisfies ``dPsi = [[0, v], [u v, 0]] Psi``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .contour import (
    ContourPath,
    PathSegment,
    SingularityTooClose,
    Tolerances,
    integrate_path,
    line,
    min_distance,
)
from .sphere import INF, HeunParameters, QuadDiff, potential_u, potential_u_derivative

__all__ = [
    "SchroedingerData",
    "MonodromyRep",
    "LambdaSample",
    "PsiSample",
    "KeyholeLoop",
    "phi_transfer",
    "keyhole_loops",
    "choose_basepoint",
    "wkb_density",
    "puncture_monodromies",
    "trace_function",
    "monodromy_and_derivatives",
    "dM_dt",
    "dM_dmu",
    "lambda_field",
    "psi_gauge",
    "psi_monodromy",
    "third_order_residual",
    "schwarzian_of_ratio",
]


SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)


@dataclass(frozen=True)
class SchroedingerData:
    Q: QuadDiff

    @property
    def singularities(self) -> list[complex]:
        return list(self.Q.base.finite)

    def coefficient(self, x: complex) -> np.ndarray:
        return np.array([[0, 1], [-self.Q(x), 0]], dtype=complex)

    def default_tolerances(self, **kw) -> Tolerances:
        return Tolerances.for_points(self.singularities, **kw)

    def _rhs(self):
        num = np.asarray(self.Q.numerator, dtype=complex)
        poles = self.singularities
        c0 = complex(num[0]) if num.size == 1 else None

        def rhs(x, y):
            D = 1 + 0j
            for p in poles:
                D *= x - p
            q = (c0 if c0 is not None else complex(np.polyval(num, x))) / D
            return np.array([y[2], y[3], -q * y[0], -q * y[1]])

        return rhs


def phi_transfer(data: SchroedingerData, path: ContourPath, tol: Tolerances | None = None,
                 mesh=None, record=None) -> np.ndarray:
    """Transfer matrix of the Phi-system along ``path``."""
    tol = tol or data.default_tolerances()
    y = integrate_path(data._rhs(), np.array([1, 0, 0, 1], dtype=complex), path, tol,
                       singularities=data.singularities, mesh=mesh, record=record)
    return y.reshape(2, 2)


def trace_function(data: SchroedingerData, loop: ContourPath, tol: Tolerances | None = None) -> complex:
    if not loop.closed:
        raise ValueError("trace functions need a closed loop")
    return complex(np.trace(phi_transfer(data, loop, tol)))


# --------------------------------------------------------------------------
# keyhole loops
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class KeyholeLoop:
    label: str
    puncture: object
    path: ContourPath
    angle: float


def _radii(finite: Sequence[complex]) -> dict:
    out = {}
    for i, y in enumerate(finite):
        nn = min(abs(y - z) for j, z in enumerate(finite) if j != i)
        out[i] = nn / 3
    return out


def _leg_ok(x0: complex, target: complex, finite, radii, skip: int | None, margin: float = 0.25) -> bool:
    seg = line(x0, target)
    for k, y in enumerate(finite):
        if k == skip:
            continue
        if min_distance(seg, [y]) < radii[k] * (1 + margin):
            return False
    return True


def _keyhole_geometry(x0: complex, finite, radii):
    """Entry points for each finite puncture and the infinity direction, or None."""
    for k, y in enumerate(finite):
        if abs(x0 - y) < radii[k] * 1.5:
            return None
    entries = []
    for k, y in enumerate(finite):
        u = (x0 - y) / abs(x0 - y)
        q = y + radii[k] * u
        if not _leg_ok(x0, q, finite, radii, k):
            return None
        entries.append(q)
    angles = sorted(cmath.phase(y - x0) % (2 * math.pi) for y in finite)
    gaps = [(angles[(i + 1) % len(angles)] - angles[i]) % (2 * math.pi) or 2 * math.pi for i in range(len(angles))]
    i = int(np.argmax(gaps))
    theta_inf = (angles[i] + gaps[i] / 2) % (2 * math.pi)
    R = max(abs(y - x0) + radii[k] for k, y in enumerate(finite)) * 1.5 + 0.5 * max(radii.values())
    far = x0 + R * cmath.exp(1j * theta_inf)
    if not _leg_ok(x0, far, finite, radii, None):
        return None
    return entries, theta_inf, R


def _segment_cost(a: complex, b: complex, density, s, w) -> float:
    return sum(wk * density(a + sk * (b - a)) for sk, wk in zip(s, w)) * abs(b - a)


def _arc_cost(center: complex, radius: float, density, s, w) -> float:
    return sum(wk * density(center + radius * cmath.exp(2j * math.pi * sk)) for sk, wk in zip(s, w)) * 2 * math.pi * radius


def _loop_cost(x0: complex, finite, radii, geom, density, nodes: int = 16) -> float:
    """Integral of ``density`` over all keyhole loops, a proxy for log of the product of their norms."""
    s, w = np.polynomial.legendre.leggauss(nodes)
    s, w = (s + 1) / 2, w / 2
    entries, theta_inf, R = geom
    total = 0.0
    for k, q in enumerate(entries):
        total += 2 * _segment_cost(x0, q, density, s, w) + _arc_cost(finite[k], radii[k], density, s, w)
    far = x0 + R * cmath.exp(1j * theta_inf)
    return total + 2 * _segment_cost(x0, far, density, s, w) + _arc_cost(x0, R, density, s, w)


def choose_basepoint(finite: Sequence[complex], candidates: int = 24, density=None) -> complex:
    """Admissible point of a fixed candidate ring.

    Without ``density`` the point farthest from the punctures wins.  With
    ``density`` (typically |Q|^{1/2}) the point whose worst leg carries the
    least total WKB growth wins, which keeps the transfer matrices well conditioned.
    """
    finite = [complex(y) for y in finite]
    radii = _radii(finite)
    c = sum(finite) / len(finite)
    spread = max(abs(y - c) for y in finite)
    ring = [c]
    for rho in (0.25, 0.5, 0.75, 1.25):
        for k in range(candidates):
            ring.append(c + rho * spread * cmath.exp(2j * math.pi * (k + 0.5) / candidates))
    best, best_score = None, None
    for x0 in ring:
        geom = _keyhole_geometry(x0, finite, radii)
        if geom is None:
            continue
        if density is None:
            score = -min(abs(x0 - y) for y in finite)
        else:
            score = _loop_cost(x0, finite, radii, geom, density)
        if best_score is None or score < best_score - 1e-15:
            best, best_score = x0, score
    if best is None:
        raise SingularityTooClose("no admissible basepoint on the candidate ring")
    return best


def keyhole_loops(base_points: Sequence, basepoint: complex | None = None,
                  density=None) -> tuple[complex, list[KeyholeLoop]]:
    """Keyholes based at x0 around every puncture, in product order.

    Finite punctures are listed counter-clockwise as seen from x0, starting
    just after the direction of the infinity leg; the loop around infinity
    (a clockwise circle about x0) comes last.  With transfer matrices
    T_1, ..., T_m, T_inf in this order, T_inf T_m ... T_1 = I.
    """
    finite = [complex(y) for y in base_points if y is not INF]
    has_inf = any(y is INF for y in base_points)
    radii = _radii(finite)
    x0 = choose_basepoint(finite, density=density) if basepoint is None else complex(basepoint)
    geom = _keyhole_geometry(x0, finite, radii)
    if geom is None:
        raise SingularityTooClose(f"basepoint {x0} does not admit non-crossing keyholes")
    entries, theta_inf, R = geom
    loops = []
    for k, y in enumerate(finite):
        q = entries[k]
        leg = PathSegment("line", x0, q)
        circ = PathSegment("arc", q, q, y, 2 * math.pi)
        back = PathSegment("line", q, x0)
        ang = (cmath.phase(y - x0) - theta_inf) % (2 * math.pi)
        loops.append(KeyholeLoop(_label(y), y, ContourPath((leg, circ, back), closed=True), ang))
    loops.sort(key=lambda L: L.angle)
    if has_inf:
        far = x0 + R * cmath.exp(1j * theta_inf)
        path = ContourPath(
            (PathSegment("line", x0, far), PathSegment("arc", far, far, x0, -2 * math.pi), PathSegment("line", far, x0)),
            closed=True,
        )
        loops.append(KeyholeLoop("inf", INF, path, 2 * math.pi))
    return x0, loops


def _label(y: complex) -> str:
    if y.imag == 0:
        return f"{y.real:g}"
    return f"{y.real:g}{y.imag:+g}i"


@dataclass(frozen=True)
class MonodromyRep:
    basepoint: complex
    loops: tuple
    matrices: tuple
    product_residual: float
    order: tuple

    @property
    def det_residuals(self) -> list[float]:
        return [abs(np.linalg.det(M) - 1) for M in self.matrices]

    @property
    def trace_residuals(self) -> list[float]:
        return [abs(np.trace(M) - 2) for M in self.matrices]


def wkb_density(Q: QuadDiff):
    return lambda x: abs(Q(x)) ** 0.5


def puncture_monodromies(data: SchroedingerData, basepoint: complex | None = None, tol: Tolerances | None = None) -> MonodromyRep:
    """Keyhole monodromies; the default basepoint minimises the WKB growth along the legs."""
    x0, loops = keyhole_loops(data.Q.base.punctures, basepoint, density=wkb_density(data.Q))
    tol = tol or data.default_tolerances()
    mats = [phi_transfer(data, L.path, tol) for L in loops]
    prod = np.eye(2, dtype=complex)
    for M in mats:
        prod = M @ prod
    resid = float(np.max(np.abs(prod - np.eye(2))))
    order = tuple(L.label for L in loops)
    return MonodromyRep(x0, tuple(loops), tuple(mats), resid, order)


# --------------------------------------------------------------------------
# variational formulas for the Heun chart
# --------------------------------------------------------------------------


def _heun_variational_rhs(t: complex, mu: complex):
    def rhs(x, y):
        a, b, c, d = y[0], y[1], y[2], y[3]
        D = x * (x - 1) * (x - t)
        qm = 1 / D
        q = mu * qm
        qt = q / (x - t)
        l11, l12, l21 = -a * b, -b * b, a * a
        return np.array([
            c, d, -q * a, -q * b,
            -qt * l11, -qt * l12, -qt * l21, qt * l11,
            -qm * l11, -qm * l12, -qm * l21, qm * l11,
        ])

    return rhs


def monodromy_and_derivatives(params: HeunParameters, loop: ContourPath, tol: Tolerances | None = None,
                              mesh=None, record=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """M, dM/dt and dM/dmu along a loop with Phi(start) = I.

    dM/dt = -mu M int Lambda dy / (y (y-1) (y-t)^2) and
    dM/dmu = -M int Lambda dy / (y (y-1) (y-t)), Lambda = Phi^{-1} sigma_- Phi.
    """
    tol = tol or Tolerances.for_points([0, 1, params.t])
    y0 = np.zeros(12, dtype=complex)
    y0[0] = y0[3] = 1
    y = integrate_path(_heun_variational_rhs(params.t, params.mu), y0, loop, tol,
                       singularities=[0j, 1 + 0j, params.t], mesh=mesh, record=record)
    M = y[:4].reshape(2, 2)
    Xt = y[4:8].reshape(2, 2)
    Xm = y[8:].reshape(2, 2)
    return M, M @ Xt, M @ Xm


def dM_dt(params: HeunParameters, loop: ContourPath, tol: Tolerances | None = None) -> np.ndarray:
    return monodromy_and_derivatives(params, loop, tol)[1]


def dM_dmu(params: HeunParameters, loop: ContourPath, tol: Tolerances | None = None) -> np.ndarray:
    return monodromy_and_derivatives(params, loop, tol)[2]


# --------------------------------------------------------------------------
# Lambda, Psi and the third-order equation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LambdaSample:
    points: np.ndarray
    values: np.ndarray = field(repr=False)

    def invariants(self) -> tuple[float, float]:
        """Largest |tr Lambda| and |det Lambda| over the samples."""
        tr = np.abs(self.values[:, 0, 0] + self.values[:, 1, 1])
        det = np.abs(np.linalg.det(self.values))
        return float(tr.max()), float(det.max())


def lambda_field(data: SchroedingerData, path: ContourPath, tol: Tolerances | None = None) -> LambdaSample:
    """Lambda = Phi^{-1} sigma_- Phi at the integrator nodes, with Phi(path.start) = I."""
    pts, vals = [], []

    def obs(x, y):
        a, b = y[0], y[1]
        pts.append(x)
        vals.append(np.array([[-a * b, -b * b], [a * a, a * b]]))

    tol = tol or data.default_tolerances()
    integrate_path(data._rhs(), np.array([1, 0, 0, 1], dtype=complex), path, tol,
                   singularities=data.singularities, observer=obs)
    return LambdaSample(np.asarray(pts), np.asarray(vals))


def _gauge(r: complex, L: complex) -> np.ndarray:
    """diag(r, 1/r) [[1, 0], [L/4, 1]] with r = v^{1/2} and L = Q'/Q (so v'/(2v) = L/4)."""
    return np.array([[r, 0], [L / (4 * r), 1 / r]], dtype=complex)


@dataclass(frozen=True)
class PsiSample:
    points: np.ndarray
    psi: np.ndarray = field(repr=False)
    phi: np.ndarray = field(repr=False)
    sqrt_v: np.ndarray = field(repr=False)


def _zeros_and_poles(Q: QuadDiff) -> list[complex]:
    zs = [] if Q.degree <= 0 else list(Q.zeros)
    return zs + list(Q.base.finite)


def psi_gauge(data: SchroedingerData, path: ContourPath, r0: complex | None = None,
              tol: Tolerances | None = None) -> PsiSample:
    """Psi along ``path`` from Phi(start) = I and a tracked v^{1/2}.

    ``r0`` fixes v^{1/2} at the start (default: principal fourth root of Q).
    """
    Q = data.Q
    sing = _zeros_and_poles(Q)
    tol = tol or Tolerances.for_points(sing)
    if r0 is None:
        r0 = cmath.sqrt(cmath.sqrt(Q(path.start)))
    base_rhs = data._rhs()

    def rhs(x, y):
        L = Q.log_derivatives(x)[0]
        out = np.empty(5, dtype=complex)
        out[:4] = base_rhs(x, y[:4])
        out[4] = y[4] * L / 4
        return out

    pts, psis, phis, rs = [], [], [], []

    def obs(x, y):
        Phi = y[:4].reshape(2, 2)
        L = Q.log_derivatives(x)[0]
        pts.append(x)
        phis.append(Phi)
        rs.append(y[4])
        psis.append(_gauge(y[4], L) @ Phi)

    y0 = np.array([1, 0, 0, 1, r0], dtype=complex)
    integrate_path(rhs, y0, path, tol, singularities=sing, observer=obs)
    return PsiSample(np.asarray(pts), np.asarray(psis), np.asarray(phis), np.asarray(rs))


def psi_monodromy(data: SchroedingerData, loop: ContourPath, tol: Tolerances | None = None) -> dict:
    """Psi- and Phi-monodromy of a closed loop and the measured scalar factor.

    Returns the factor c = v^{1/2}(end) / v^{1/2}(start) and whether the
    loop ends on the other sheet (v -> -v).  In both cases
    M_Psi = c S G0 M_Phi G0^{-1} with S = diag(1, -1) on a sheet flip and
    S = I otherwise.
    """
    s = psi_gauge(data, loop, tol=tol)
    r_start, r_end = s.sqrt_v[0], s.sqrt_v[-1]
    c = r_end / r_start
    flipped = abs(c * c + 1) < abs(c * c - 1)
    L0 = data.Q.log_derivatives(loop.start)[0]
    G0 = _gauge(r_start, L0)
    M_phi = s.phi[-1]
    M_psi = s.psi[-1] @ np.linalg.inv(s.psi[0])
    S = np.diag([1, -1]) if flipped else np.eye(2)
    predicted = c * S @ G0 @ M_phi @ np.linalg.inv(G0)
    return {
        "M_psi": M_psi,
        "M_phi": M_phi,
        "factor": complex(c),
        "sheet_flip": bool(flipped),
        "gauge_residual": float(np.max(np.abs(M_psi - predicted))),
    }


def _z_line_samples(Q: QuadDiff, x_start: complex, direction: complex, h: float, count: int,
                    tol: Tolerances) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Integrate along a straight line in z = int v from x_start; sample x, Phi, v^{1/2} every h."""
    sing = _zeros_and_poles(Q)
    r0 = cmath.sqrt(cmath.sqrt(Q(x_start)))
    base = SchroedingerData(Q)._rhs()

    def rhs(z, y):
        x, r = y[0], y[5]
        v = r * r
        L = Q.log_derivatives(x)[0]
        out = np.empty(6, dtype=complex)
        out[0] = 1 / v
        out[1:5] = base(x, y[1:5]) / v
        out[5] = r * L / (4 * v)
        return out

    y = np.array([x_start, 1, 0, 0, 1, r0], dtype=complex)
    xs, phis, rs = [y[0]], [y[1:5].reshape(2, 2)], [y[5]]
    direction = direction / abs(direction)
    for k in range(count - 1):
        seg = line(k * h * direction, (k + 1) * h * direction)
        y = integrate_path(rhs, y, seg, tol)
        if min(abs(y[0] - e) for e in sing) < tol.singularity_clearance:
            raise SingularityTooClose("z-line runs into a branch point")
        xs.append(y[0])
        phis.append(y[1:5].reshape(2, 2))
        rs.append(y[5])
    return np.asarray(xs), np.asarray(phis), np.asarray(rs)


_D1 = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
_D3 = np.array([1, -8, 13, 0, -13, 8, -1]) / 8.0


def third_order_residual(Q: QuadDiff, x_start: complex, direction: complex = 1.0, h: float = 0.02,
                         count: int = 41, tol: Tolerances | None = None, sign: int = 1) -> dict:
    """Residual of Lambda_zzz - 4 u Lambda_z - 2 u_z Lambda on a uniform z-grid.

    Lambda = Psi^{-1} sigma_- Psi with Psi(z_0) = I, where z_0 is the first
    grid point.  Derivatives are sixth-order central differences.  ``sign``
    = -1 evaluates the equation with u replaced by -u.
    """
    if Q.is_zero:
        raise ValueError("u is undefined for Q = 0")
    tol = tol or Tolerances(abs_tol=1e-13, rel_tol=1e-13, singularity_clearance=1e-3)
    xs, phis, rs = _z_line_samples(Q, x_start, direction, h, count, tol)
    psis = np.array([_gauge(r, Q.log_derivatives(x)[0]) @ P for x, r, P in zip(xs, rs, phis)])
    psi0_inv = np.linalg.inv(psis[0])
    lam = []
    for P in psis:
        Pn = P @ psi0_inv
        a, b = Pn[0, 0], Pn[0, 1]
        lam.append(np.array([[-a * b, -b * b], [a * a, a * b]]))
    lam = np.asarray(lam)
    du = direction / abs(direction)
    dz = h * du
    worst, scale = 0.0, 0.0
    for k in range(3, count - 3):
        window = lam[k - 3:k + 4]
        l1 = np.tensordot(_D1, window, axes=1) / dz
        l3 = np.tensordot(_D3, window, axes=1) / dz**3
        x = xs[k]
        v = rs[k] ** 2
        u = sign * potential_u(Q, x)
        uz = sign * potential_u_derivative(Q, x) / v
        res = l3 - 4 * u * l1 - 2 * uz * lam[k]
        worst = max(worst, float(np.max(np.abs(res))))
        scale = max(scale, float(np.max(np.abs(l3))), float(np.max(np.abs(4 * u * l1))))
    return {"residual": worst, "scale": scale, "relative": worst / scale if scale else worst, "h": h}


def schwarzian_of_ratio(Q: QuadDiff, x0: complex, direction: complex = 1.0, h: float = 0.01,
                        tol: Tolerances | None = None) -> dict:
    """Schwarzian of f = phi_1 / phi_2 at x0 by central differences, compared with c Q for c in {1, 2}."""
    tol = tol or Tolerances(abs_tol=1e-14, rel_tol=1e-14, singularity_clearance=1e-3)
    data = SchroedingerData(Q)
    d = direction / abs(direction)
    start = x0 - 4 * h * d
    # phi_1 = 1 + O, phi_2 = 1 + (x - start) + O: independent, neither vanishes nearby
    y = np.array([1, 1, 0, 1], dtype=complex)
    fs = []
    for k in range(9):
        if k:
            y = integrate_path(data._rhs(), y, line(start + (k - 1) * h * d, start + k * h * d), tol,
                               singularities=data.singularities)
        fs.append(y[0] / y[1])
    fs = np.asarray(fs)
    c1 = np.array([3, -32, 168, -672, 0, 672, -168, 32, -3]) / 840.0
    c2 = np.array([-9, 128, -1008, 8064, -14350, 8064, -1008, 128, -9]) / 5040.0
    c3 = np.array([-7, 72, -338, 488, 0, -488, 338, -72, 7]) / 240.0
    step = h * d
    f1 = c1 @ fs / step
    f2 = c2 @ fs / step**2
    f3 = c3 @ fs / step**3
    S = f3 / f1 - 1.5 * (f2 / f1) ** 2
    q = Q(x0)
    res = {c: abs(S - c * q) / abs(q) for c in (1, 2)}
    passing = [c for c, r in res.items() if r < 1e-6]
    return {"schwarzian": complex(S), "Q": complex(q), "residuals": res,
            "c": passing[0] if len(passing) == 1 else None}
