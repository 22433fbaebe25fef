"""The canonical double cover v^2 = Q, its homology basis and periods.

In the x-chart ``v = w / D(x)`` where ``D`` is the monic product over the
finite punctures and ``w^2 = N(x) D(x)`` is a polynomial.  The branch points
are the roots of ``N D`` together with infinity when ``deg(N D)`` is odd.
Sheets are tracked by carrying ``w`` in the integration state through
``w' = (w / 2) sum 1 / (x - e)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .contour import (
    ContourError,
    ContourPath,
    SingularityTooClose,
    Tolerances,
    integrate_path,
    line,
    min_distance,
)
from .loops import crossings, sausage, stadium, subpath
from .sphere import INF, QuadDiff, schwarzian_v

__all__ = [
    "SheetClosureError",
    "CanonicalCover",
    "CutSystem",
    "CoverCycle",
    "HomologyBasis",
    "PeriodData",
    "SecondKindPeriods",
    "build_cover",
    "default_cuts",
    "homology_cycles",
    "cover_intersection",
    "integrate_on_cover",
    "period",
    "all_periods",
    "flat_coordinate",
    "second_kind_periods",
    "branch_residue",
    "tau_pairing",
    "tau_pairing_homogeneity_value",
    "tau_pairing_residue_value",
    "agm",
    "ellipk",
    "elliptic_oracle",
]


class SheetClosureError(ContourError):
    pass


def _lex_key(p):
    return (math.inf, math.inf) if p is INF else (p.real, p.imag)


@dataclass(frozen=True)
class CanonicalCover:
    Q: QuadDiff
    branch_points: tuple
    zeros: tuple
    poles: tuple
    leading: complex
    genus: int

    @property
    def finite_branch_points(self) -> list[complex]:
        return [p for p in self.branch_points if p is not INF]

    def w_principal(self, x: complex) -> complex:
        prod = self.leading
        for e in self.finite_branch_points:
            prod *= x - e
        return cmath.sqrt(prod)

    def denominator(self, x: complex) -> complex:
        out = 1 + 0j
        for y in self.poles:
            out *= x - y
        return out

    def v(self, x: complex, w: complex) -> complex:
        return w / self.denominator(x)

    def involution(self, x: complex, w: complex) -> tuple[complex, complex]:
        return x, -w


def build_cover(Q: QuadDiff) -> CanonicalCover:
    """Branch points are zeros and poles of Q; infinity when the pole there is simple."""
    Q.check_simple()
    zeros = tuple(complex(z) for z in Q.zeros)
    poles = tuple(Q.base.finite)
    bps = list(zeros) + list(poles)
    if Q.pole_at_infinity():
        bps.append(INF)
    n = Q.base.n
    if len(bps) != 2 * n - 4:
        raise ValueError(f"expected {2 * n - 4} branch points, found {len(bps)}")
    return CanonicalCover(Q, tuple(bps), zeros, poles, complex(Q.numerator[0]), n - 3)


@dataclass(frozen=True)
class CutSystem:
    """Consecutive pairs of an ordering e_1, ..., e_{2g+2} of the branch points."""

    order: tuple

    def __post_init__(self):
        if len(self.order) % 2:
            raise ValueError("a cut system needs an even number of branch points")
        finite = [p for p in self.order if p is not INF]
        if len({(p.real, p.imag) for p in finite}) != len(finite):
            raise ValueError("branch points in a cut system must be distinct")

    @property
    def cuts(self) -> list[tuple]:
        return [(self.order[i], self.order[i + 1]) for i in range(0, len(self.order), 2)]

    def check_disjoint(self) -> None:
        segs = []
        for a, b in self.cuts:
            if a is INF or b is INF:
                p = b if a is INF else a
                segs.append((p, p + 1e6 * (p / abs(p) if abs(p) > 0 else 1)))
            else:
                segs.append((a, b))
        for i in range(len(segs)):
            for j in range(i + 1, len(segs)):
                if _segments_meet(*segs[i], *segs[j]):
                    raise ValueError(f"cuts {i} and {j} intersect")


def _segments_meet(a, b, c, d) -> bool:
    def cr(u, v):
        return (u.conjugate() * v).imag

    d1, d2 = cr(b - a, c - a), cr(b - a, d - a)
    d3, d4 = cr(d - c, a - c), cr(d - c, b - c)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def default_cuts(cover: CanonicalCover) -> CutSystem:
    """Branch points sorted by (re, im), infinity last, paired consecutively."""
    return CutSystem(tuple(sorted(cover.branch_points, key=_lex_key)))


@dataclass(frozen=True)
class CoverCycle:
    """A closed plane path with the determination ``w0`` of w at its start."""

    path: ContourPath
    w0: complex
    label: str = ""

    def reversed(self) -> "CoverCycle":
        return CoverCycle(self.path.reversed(), self.w0, self.label + "^-1")


@dataclass(frozen=True)
class HomologyBasis:
    a: tuple
    b: tuple
    intersection: np.ndarray = field(repr=False)
    cuts: CutSystem = None

    @property
    def genus(self) -> int:
        return len(self.a)

    @property
    def cycles(self) -> list[CoverCycle]:
        return list(self.a) + list(self.b)

    def duals(self) -> list[tuple[int, CoverCycle]]:
        """Dual of each basis cycle as (sign, cycle): a_i* = -b_i, b_i* = +a_i, so s* o s = 1."""
        return [(-1, c) for c in self.b] + [(1, c) for c in self.a]


def _w_rhs_factory(cover_like, extra):
    bps = list(cover_like[0])
    poles = list(cover_like[1])

    def rhs(x, y):
        w = y[0]
        acc = 0j
        for e in bps:
            acc += 1 / (x - e)
        D = 1 + 0j
        for p in poles:
            D *= x - p
        out = [0.5 * w * acc]
        if extra:
            v = w / D
            out.extend(g(x, w, v) for g in extra)
        return np.array(out)

    return rhs


def _branch_data(Q: QuadDiff):
    zeros = [complex(z) for z in Q.zeros]
    poles = list(Q.base.finite)
    return zeros + poles, poles, complex(Q.numerator[0])


def _start_w(Q: QuadDiff, x: complex, w_ref: complex | None, sign: int = 1) -> complex:
    bps, _, lead = _branch_data(Q)
    prod = lead
    for e in bps:
        prod *= x - e
    w = cmath.sqrt(prod)
    if w_ref is None:
        return sign * w
    return w if abs(w - w_ref) <= abs(w + w_ref) else -w


def integrate_on_cover(
    Q: QuadDiff,
    path: ContourPath,
    w_start: complex,
    integrands: Sequence = (),
    tol: Tolerances | None = None,
    mesh=None,
    record=None,
) -> np.ndarray:
    """Integrate ``g(x, w, v) dx`` for each g along ``path``; returns [w_end, *integrals]."""
    bps, poles, _ = _branch_data(Q)
    rhs = _w_rhs_factory((bps, poles), list(integrands))
    y0 = np.zeros(1 + len(integrands), dtype=complex)
    y0[0] = w_start
    return integrate_path(rhs, y0, path, tol, singularities=bps, mesh=mesh, record=record)


def _sheet_closes(w0: complex, w1: complex) -> bool:
    return abs(w1 - w0) <= abs(w1 + w0)


def period(cover: CanonicalCover, cycle: CoverCycle, tol: Tolerances | None = None, Q: QuadDiff | None = None,
           mesh=None, record=None) -> complex:
    """Integral of v over the sheet-tracked cycle.

    With ``Q`` given the same cycle is used on the cover of a nearby
    differential; the starting sheet is then the one closest to ``cycle.w0``.
    """
    Q = cover.Q if Q is None else Q
    w0 = cycle.w0 if Q is cover.Q else _start_w(Q, cycle.path.start, cycle.w0)
    y = integrate_on_cover(Q, cycle.path, w0, [lambda x, w, v: v], tol, mesh=mesh, record=record)
    if not _sheet_closes(w0, y[0]):
        raise SheetClosureError(f"cycle {cycle.label!r} does not close on the cover")
    return complex(y[1])


def _chain_clearance(points: list[complex], others: list[complex]) -> float:
    """Smallest distance from a branch point to a chain edge not incident to it."""
    best = math.inf
    for k, p in enumerate(points):
        for j in range(len(points) - 1):
            if j == k or j + 1 == k:
                continue
            best = min(best, min_distance(line(points[j], points[j + 1]), [p]))
    for p in others:
        for j in range(len(points) - 1):
            best = min(best, min_distance(line(points[j], points[j + 1]), [p]))
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            best = min(best, abs(points[i] - points[j]))
    return best


def homology_cycles(cover: CanonicalCover, cuts: CutSystem | None = None, tol: Tolerances | None = None,
                    check: bool = True) -> HomologyBasis:
    """Integer symplectic basis built from a cut system.

    With branch points ordered e_1, ..., e_{2g+2}: a_i encircles {e_{2i-1}, e_{2i}}
    and b_i encircles the chain {e_{2i}, ..., e_{2g+1}}.  Orientation of each
    b_i is fixed so that a_i o b_i = +1, and the whole intersection matrix is
    then measured on the cover from signed, sheet-matched crossings.
    """
    cuts = cuts or default_cuts(cover)
    order = list(cuts.order)
    g = cover.genus
    if len(order) != 2 * g + 2:
        raise ValueError("cut system does not match the cover")
    used = order[: 2 * g + 1]
    if any(p is INF for p in used):
        raise ValueError("infinity must be the last branch point of the cut ordering")
    finite_all = cover.finite_branch_points
    r0 = 0.3 * _chain_clearance(used, [p for p in finite_all if p not in used])
    r_a = 0.4 * r0
    a_cycles, b_cycles = [], []
    for i in range(1, g + 1):
        e1, e2 = order[2 * i - 2], order[2 * i - 1]
        path = stadium(e1, e2, r_a)
        a_cycles.append(CoverCycle(path, cover.w_principal(path.start), f"a{i}"))
    for i in range(1, g + 1):
        chain = order[2 * i - 1: 2 * g + 1]
        r_b = r0 * (1.0 - 0.08 * (i - 1))
        path = sausage(chain, r_b)
        b_cycles.append(CoverCycle(path, cover.w_principal(path.start), f"b{i}"))
    tol = tol or Tolerances.for_points(finite_all, abs_tol=1e-11, rel_tol=1e-11)
    for c in a_cycles + b_cycles:
        y = integrate_on_cover(cover.Q, c.path, c.w0, (), tol)
        if not _sheet_closes(c.w0, y[0]):
            raise SheetClosureError(f"basis cycle {c.label} does not close on the cover")
    for i in range(g):
        if cover_intersection(cover, a_cycles[i], b_cycles[i], tol) < 0:
            b_cycles[i] = CoverCycle(b_cycles[i].path.reversed(), b_cycles[i].w0, b_cycles[i].label)
    cyc = a_cycles + b_cycles
    m = np.zeros((2 * g, 2 * g), dtype=int)
    if check:
        for i in range(2 * g):
            for j in range(i + 1, 2 * g):
                m[i, j] = cover_intersection(cover, cyc[i], cyc[j], tol)
                m[j, i] = -m[i, j]
    else:
        m[:g, g:] = np.eye(g, dtype=int)
        m[g:, :g] = -np.eye(g, dtype=int)
    return HomologyBasis(tuple(a_cycles), tuple(b_cycles), m, cuts)


def _w_at(cover: CanonicalCover, cycle: CoverCycle, loc, tol) -> complex:
    sub = subpath(cycle.path, loc)
    if sub is None:
        return cycle.w0
    return complex(integrate_on_cover(cover.Q, sub, cycle.w0, (), tol)[0])


def cover_intersection(cover: CanonicalCover, c1: CoverCycle, c2: CoverCycle, tol: Tolerances | None = None) -> int:
    """Algebraic intersection number of two lifted cycles.

    A plane crossing counts, with its sign, only when both lifts pass through
    it on the same sheet.
    """
    total = 0
    for d in crossings(c1.path, c2.path):
        w1 = _w_at(cover, c1, d.loc, tol)
        w2 = _w_at(cover, c2, d.loc_other, tol)
        if abs(w1 - w2) < abs(w1 + w2):
            total += d.nu
    return total


@dataclass(frozen=True)
class PeriodData:
    A: tuple
    B: tuple
    kappa_norm: float | None = None
    basis: HomologyBasis | None = field(default=None, repr=False)


def all_periods(cover: CanonicalCover, basis: HomologyBasis | None = None, tol: Tolerances | None = None,
                kappa_norm: float | None = None) -> PeriodData:
    basis = basis or homology_cycles(cover, tol=tol)
    A = tuple(period(cover, c, tol) for c in basis.a)
    B = tuple(period(cover, c, tol) for c in basis.b)
    return PeriodData(A, B, kappa_norm, basis)


def flat_coordinate(cover: CanonicalCover, x: complex, basepoint: complex | None = None, sheet: int = 1,
                    tol: Tolerances | None = None) -> tuple[complex, complex]:
    """z(x) = integral of v from a branch point along the straight segment.

    The substitution x = b + s^2 removes the square-root behaviour at the
    basepoint b.  ``sheet`` picks the lift; ``w = s * w_hat`` with ``w_hat``
    the principal determination at b.  Returns (z, w(x)).
    """
    finite = cover.finite_branch_points
    if basepoint is None:
        basepoint = sorted(cover.zeros, key=_lex_key)[0] if cover.zeros else cover.Q.base.finite[0]
    b = complex(basepoint)
    if not any(abs(b - e) < 1e-14 * max(1.0, abs(b)) for e in finite):
        raise ValueError("flat-coordinate basepoint must be a finite branch point")
    x = complex(x)
    others = [e for e in finite if abs(e - b) > 1e-14 * max(1.0, abs(b))]
    tol = tol or Tolerances.for_points(finite)
    if min_distance(line(b, x), others) < tol.singularity_clearance:
        raise SingularityTooClose("straight path from the basepoint passes too close to a branch point")
    b_is_pole = any(abs(b - y) < 1e-14 * max(1.0, abs(b)) for y in cover.poles)
    poles_hat = [y for y in cover.poles if abs(y - b) > 1e-14 * max(1.0, abs(b))]
    lead = cover.leading
    prod = lead
    for e in others:
        prod *= b - e
    w_hat0 = cmath.sqrt(prod)
    sigma = sheet * cmath.sqrt(x - b)

    def rhs(s, y):
        xs = b + s * s
        wh = y[0]
        acc = 0j
        for e in others:
            acc += 1 / (xs - e)
        D = 1 + 0j
        for p in poles_hat:
            D *= xs - p
        dz = 2 * wh / D if b_is_pole else 2 * s * s * wh / D
        return np.array([wh * acc * s, dz])

    y = integrate_path(rhs, np.array([w_hat0, 0j]), line(0j, sigma), tol)
    return complex(y[1]), complex(sigma * y[0])


@dataclass(frozen=True)
class SecondKindPeriods:
    A_tilde: tuple
    B_tilde: tuple


def _second_kind(Q: QuadDiff):
    def g(x, w, v):
        return schwarzian_v(Q, x) / (2 * v)

    return g


def second_kind_periods(cover: CanonicalCover, basis: HomologyBasis, tol: Tolerances | None = None) -> SecondKindPeriods:
    """Cycle integrals of (u + 1) v = S_v / (2 v) with the sheet tracking of :func:`period`."""
    g = _second_kind(cover.Q)
    out = []
    for c in basis.cycles:
        y = integrate_on_cover(cover.Q, c.path, c.w0, [g], tol)
        if not _sheet_closes(c.w0, y[0]):
            raise SheetClosureError(f"cycle {c.label} does not close on the cover")
        out.append(complex(y[1]))
    gen = basis.genus
    return SecondKindPeriods(tuple(out[:gen]), tuple(out[gen:]))


def branch_residue(cover: CanonicalCover, e: complex, integrand, radius: float, tol: Tolerances | None = None) -> complex:
    """Residue on the cover at a finite branch point: a double turn around e, divided by 2 pi i."""
    e = complex(e)
    start = e + radius
    from .contour import PathSegment

    turn = PathSegment("arc", start, start, e, 2 * math.pi)
    path = ContourPath((turn, turn), closed=True)
    y = integrate_on_cover(cover.Q, path, cover.w_principal(start), [integrand], tol)
    return complex(y[1]) / (2j * math.pi)


def tau_pairing(periods: PeriodData, second: SecondKindPeriods) -> complex:
    """sum_i (A~_i B_i - B~_i A_i)."""
    return complex(sum(at * b - bt * a for at, bt, a, b in zip(second.A_tilde, second.B_tilde, periods.A, periods.B)))


def tau_pairing_homogeneity_value(n: int, g: int = 0) -> complex:
    """(2 pi i / 3)(5g - 5 + n), expected from homogeneity of the tau-function."""
    return 2j * math.pi / 3 * (5 * g - 5 + n)


def tau_pairing_residue_value(n_poles: int, n_zeros: int) -> complex:
    """Riemann bilinear value of the pairing in a basis with a_i o b_i = +1.

    z (u + 1) v has residue 3/4 at every pole of Q and -5/12 at every zero,
    so sum (A~ B - B~ A) = -2 pi i (3 n_poles / 4 - 5 n_zeros / 12).
    """
    return -2j * math.pi * (0.75 * n_poles - 5.0 * n_zeros / 12.0)


# --------------------------------------------------------------------------
# elliptic oracle
# --------------------------------------------------------------------------


def agm(a: complex, b: complex, max_iter: int = 64) -> complex:
    """Arithmetic-geometric mean with the right choice of square root at every step."""
    a, b = complex(a), complex(b)
    for _ in range(max_iter):
        a1 = (a + b) / 2
        b1 = cmath.sqrt(a * b)
        if abs(a1 - b1) > abs(a1 + b1):
            b1 = -b1
        a, b = a1, b1
        if abs(a - b) <= 4e-16 * abs(a):
            return a
    if abs(a - b) <= 1e-13 * abs(a):
        return a
    raise ArithmeticError("AGM did not converge")


def ellipk(m: complex) -> complex:
    """Complete elliptic integral K(m) = pi / (2 AGM(1, sqrt(1 - m))), m off [1, inf)."""
    m = complex(m)
    if m.imag == 0 and m.real >= 1:
        raise ValueError("K(m) is singular or multivalued for real m >= 1")
    return math.pi / (2 * agm(1.0, cmath.sqrt(1 - m)))


def _cut_period(r: complex, s: complex, q: complex) -> complex:
    """Period of dx / sqrt((x - r)(x - s)(x - q)) around the segment [r, s], up to sign."""
    m = (s - r) / (q - r)
    return 4 * ellipk(m) / cmath.sqrt(q - r)


def elliptic_oracle(t: complex, mu: complex = 1.0) -> tuple[complex, complex]:
    """Periods of v = sqrt(mu / (x (x - 1)(x - t))) around [0, t] and [t, 1], each up to sign."""
    t = complex(t)
    if t in (0, 1):
        raise ValueError("t must avoid 0 and 1")
    root = cmath.sqrt(complex(mu))
    return root * _cut_period(0j, t, 1 + 0j), root * _cut_period(1 + 0j, t, 0j)
