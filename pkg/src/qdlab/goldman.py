"""Poisson brackets of trace functions against the loop-resolution formula.

The left-hand side is the canonical bracket of ``f = tr M_gamma`` and
``g = tr M_gamma~`` evaluated in two charts: (t, mu) with
``{mu, t} = t (1 - t) / (4 pi i)``, and the periods with
``{A_i, B_j} = delta_ij / kappa`` (kappa measured on the chart).  The
right-hand side resolves each crossing p of the two loops:

    1/2 sum_p nu(p) (tr M(gamma_p gamma~_p) - tr M(gamma_p gamma~_p^{-1})).

A global sign on nu is fixed once on a designated pair and then frozen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .contour import ContourPath, Tolerances, circle, min_distance
from .fd import richardson
from .loops import IntersectionDatum, crossings, sausage
from .monodromy import SchroedingerData, monodromy_and_derivatives, phi_transfer
from .sphere import HeunParameters, heun_Q
from .variational import PeriodJacobian, period_jacobian

__all__ = [
    "CalibrationError",
    "GeomLoop",
    "ResolvedPair",
    "BracketReport",
    "Calibration",
    "intersections",
    "resolve",
    "goldman_rhs",
    "trace_gradient",
    "trace_gradient_fd",
    "poisson_lhs_tm",
    "poisson_lhs_periods",
    "calibrate_sign",
    "verify_goldman",
    "default_pair_suite",
]


class CalibrationError(RuntimeError):
    """The designated pair matches the bracket under neither sign of nu."""

    def __init__(self, message: str, diagnostics: dict):
        super().__init__(message)
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class GeomLoop:
    path: ContourPath
    clearance: float
    label: str = ""

    def __post_init__(self):
        if not self.path.closed:
            raise ValueError("loops must be closed")


def _admissible(loop: GeomLoop, punctures) -> None:
    d = min_distance(loop.path, punctures)
    if d < loop.clearance:
        raise ValueError(f"loop {loop.label!r} passes within {d:.3e} of a puncture")


@dataclass(frozen=True)
class ResolvedPair:
    loop_plus: ContourPath
    loop_minus: ContourPath


def intersections(gamma: ContourPath, gamma_t: ContourPath, min_angle_deg: float = 10.0) -> list[IntersectionDatum]:
    return crossings(gamma, gamma_t, min_angle_deg=min_angle_deg)


def resolve(gamma: ContourPath, gamma_t: ContourPath, p: IntersectionDatum) -> ResolvedPair:
    """gamma from p back to p followed by gamma~ (plus) or gamma~ reversed (minus)."""
    g = gamma.rotated(*p.loc)
    h = gamma_t.rotated(*p.loc_other)
    return ResolvedPair(g.then(h), g.then(h.reversed()))


def _trace(data: SchroedingerData, path: ContourPath, tol) -> complex:
    return complex(np.trace(phi_transfer(data, path, tol)))


def goldman_rhs(Q, gamma: ContourPath, gamma_t: ContourPath, sign: int = 1, tol: Tolerances | None = None,
                detail: bool = False):
    """1/2 sum_p sign nu(p) (tr M_plus - tr M_minus) over all crossings."""
    data = SchroedingerData(Q)
    tol = tol or Tolerances(abs_tol=1e-13, rel_tol=1e-13)
    parts = []
    for p in intersections(gamma, gamma_t):
        r = resolve(gamma, gamma_t, p)
        c = 0.5 * sign * p.nu * (_trace(data, r.loop_plus, tol) - _trace(data, r.loop_minus, tol))
        parts.append({"point": p.point, "nu": p.nu, "contribution": c})
    total = complex(sum(x["contribution"] for x in parts))
    return (total, parts) if detail else total


def trace_gradient(params: HeunParameters, loop: ContourPath, tol: Tolerances | None = None) -> tuple[complex, complex, complex]:
    """(tr M, d tr M / dt, d tr M / dmu) from the variational system."""
    M, Mt, Mm = monodromy_and_derivatives(params, loop, tol)
    return complex(np.trace(M)), complex(np.trace(Mt)), complex(np.trace(Mm))


def trace_gradient_fd(params: HeunParameters, loop: ContourPath, h: float = 1e-5,
                      tol: Tolerances | None = None) -> tuple[complex, complex]:
    tol = tol or Tolerances(abs_tol=1e-13, rel_tol=1e-13)
    rec: list = []
    monodromy_and_derivatives(params, loop, tol, record=rec)
    ft = lambda t: np.trace(monodromy_and_derivatives(HeunParameters(t, params.mu), loop, tol, mesh=rec)[0])
    fm = lambda m: np.trace(monodromy_and_derivatives(HeunParameters(params.t, m), loop, tol, mesh=rec)[0])
    return complex(richardson(ft, params.t, h).value), complex(richardson(fm, params.mu, h).value)


def poisson_bracket_tm(params: HeunParameters) -> complex:
    t = params.t
    return t * (1 - t) / (4j * math.pi)


def poisson_lhs_tm(params: HeunParameters, gamma: ContourPath, gamma_t: ContourPath,
                   tol: Tolerances | None = None) -> complex:
    """{mu, t} (f_mu g_t - f_t g_mu) for f, g the traces along the two loops."""
    _, ft, fm = trace_gradient(params, gamma, tol)
    _, gt, gm = trace_gradient(params, gamma_t, tol)
    return poisson_bracket_tm(params) * (fm * gt - ft * gm)


def poisson_lhs_periods(params: HeunParameters, gamma: ContourPath, gamma_t: ContourPath, kappa: complex,
                        pj: PeriodJacobian | None = None, tol: Tolerances | None = None) -> complex:
    """(1/kappa) sum_i (f_{A_i} g_{B_i} - f_{B_i} g_{A_i}) with gradients from d(t, mu)/d(A, B)."""
    pj = pj or period_jacobian(params)
    inv = pj.inverse()
    g = inv.shape[1] // 2
    _, ft, fm = trace_gradient(params, gamma, tol)
    _, gt, gm = trace_gradient(params, gamma_t, tol)
    fP = ft * inv[0] + fm * inv[1]
    gP = gt * inv[0] + gm * inv[1]
    return complex(np.sum(fP[:g] * gP[g:] - fP[g:] * gP[:g]) / kappa)


@dataclass(frozen=True)
class Calibration:
    sign: int | None
    pair: str
    lhs: complex
    rhs_plus: complex
    ratio: complex
    tolerance: float

    def to_dict(self) -> dict:
        return {"nu_sign": self.sign, "pair": self.pair, "lhs": [self.lhs.real, self.lhs.imag],
                "rhs_nu_plus": [self.rhs_plus.real, self.rhs_plus.imag],
                "lhs_over_rhs": [self.ratio.real, self.ratio.imag], "tolerance": self.tolerance}


@dataclass(frozen=True)
class BracketReport:
    pair: str
    lhs_tm: complex
    lhs_periods: complex
    rhs: complex
    contributions: list = field(repr=False)
    abs_err: float
    chart_rel_err: float
    tolerance: float
    passed: bool

    def to_dict(self) -> dict:
        c = lambda z: [z.real, z.imag]
        return {"pair": self.pair, "lhs_tm": c(self.lhs_tm), "lhs_periods": c(self.lhs_periods),
                "rhs": c(self.rhs), "abs_err": self.abs_err, "chart_rel_err": self.chart_rel_err,
                "tolerance": self.tolerance, "pass": self.passed,
                "contributions": [{"point": c(x["point"]), "nu": x["nu"], "value": c(x["contribution"])}
                                  for x in self.contributions]}


def calibrate_sign(params: HeunParameters, gamma: ContourPath, gamma_t: ContourPath, label: str = "calibration",
                   tolerance: float = 1e-6, tol: Tolerances | None = None) -> Calibration:
    """Pick the sign of nu for which the bracket matches on the designated pair."""
    lhs = poisson_lhs_tm(params, gamma, gamma_t, tol)
    rhs = goldman_rhs(heun_Q(params), gamma, gamma_t, 1, tol)
    ratio = lhs / rhs if rhs != 0 else complex("nan")
    errs = {s: abs(lhs - s * rhs) for s in (1, -1)}
    best = min(errs, key=errs.get)
    sign = best if errs[best] <= tolerance else None
    return Calibration(sign, label, lhs, rhs, ratio, tolerance)


def verify_goldman(params: HeunParameters, pairs: list, calibration_index: int, kappa: complex,
                   tolerance: float = 1e-6, chart_tolerance: float = 1e-5, strict: bool = True,
                   tol: Tolerances | None = None) -> tuple[Calibration, list[BracketReport]]:
    """Calibrate on ``pairs[calibration_index]`` and check every pair with the frozen sign.

    ``pairs`` holds (label, GeomLoop, GeomLoop).  With ``strict`` a failed
    calibration raises CalibrationError; otherwise the pairs are evaluated
    with nu sign +1 and the reports carry the failure.
    """
    punct = [0j, 1 + 0j, params.t]
    for _, a, b in pairs:
        _admissible(a, punct)
        _admissible(b, punct)
    label, ga, gb = pairs[calibration_index]
    cal = calibrate_sign(params, ga.path, gb.path, label, tolerance, tol)
    if cal.sign is None and strict:
        raise CalibrationError("calibration pair matches under neither sign of nu", cal.to_dict())
    sign = cal.sign or 1
    pj = period_jacobian(params)
    Q = heun_Q(params)
    reports = []
    for label, a, b in pairs:
        lhs_tm = poisson_lhs_tm(params, a.path, b.path, tol)
        lhs_p = poisson_lhs_periods(params, a.path, b.path, kappa, pj, tol)
        rhs, parts = goldman_rhs(Q, a.path, b.path, sign, tol, detail=True)
        err = abs(lhs_tm - rhs)
        chart = abs(lhs_tm - lhs_p) / max(abs(lhs_tm), 1e-300) if abs(lhs_tm) > 1e-12 else abs(lhs_tm - lhs_p)
        ok = err <= tolerance and chart <= chart_tolerance and cal.sign is not None
        reports.append(BracketReport(label, lhs_tm, lhs_p, rhs, parts, err, chart, tolerance, ok))
    return cal, reports


def _pair_radius(points, r_frac: float) -> float:
    pts = list(points)
    return r_frac * min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1:])


def default_pair_suite(params: HeunParameters) -> tuple[list, int]:
    """Disjoint and two-crossing pairs for the punctures {0, 1, t}; returns (pairs, calibration index).

    Two closed plane curves cross an even number of times, so the
    calibration uses the two-crossing pair around {0, t} and {t, 1}.
    """
    t = params.t
    d = _pair_radius([0j, 1 + 0j, t], 1.0)
    r1, r2 = 0.3 * d, 0.2 * d
    clear = 0.05 * d
    ot = GeomLoop(sausage([0j, t], r1), clear, "{0,t}")
    t1 = GeomLoop(sausage([t, 1 + 0j], r2), clear, "{t,1}")
    one = GeomLoop(circle(1 + 0j, r2), clear, "{1}")
    zero1 = GeomLoop(sausage([0j, 1 + 0j], 0.12 * d), clear, "{0,1}")
    pairs = [
        ("disjoint {0,t} | {1}", ot, one),
        ("two-crossing {0,t} | {t,1}", ot, t1),
        ("two-crossing {0,1} | {t,1}", zero1, t1),
    ]
    return pairs, 1

