"""Paths in the complex plane and adaptive integration along them.

Everything analytic in this package runs through :func:`integrate_path`: an
embedded Dormand-Prince 5(4) pair with PI step control, applied segment by
segment to the exact parametrization of lines and circular arcs.  Transfer
matrices, contour quadrature and square-root continuation are thin layers on
top of it.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "ContourError",
    "SingularityTooClose",
    "StepUnderflow",
    "NonFiniteValue",
    "MultipleRootError",
    "Tolerances",
    "PathSegment",
    "ContourPath",
    "line",
    "arc",
    "circle",
    "polyline",
    "integrate_path",
    "integrate_transfer",
    "contour_integral",
    "sqrt_continuation",
    "polynomial_roots",
    "min_distance",
    "flatten",
    "matrix_exponential",
]


class ContourError(ValueError):
    """Base class for numerical failures along a contour."""


class SingularityTooClose(ContourError):
    pass


class StepUnderflow(ContourError):
    pass


class NonFiniteValue(ContourError):
    pass


class MultipleRootError(ContourError):
    pass


@dataclass(frozen=True)
class Tolerances:
    """Error-control settings shared by every integration.

    ``abs_tol`` and ``rel_tol`` bound the local error per unit path length.
    ``singularity_clearance`` is an absolute distance in the x-chart.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    min_step: float = 1e-13
    singularity_clearance: float = 1e-3

    def __post_init__(self):
        for name in ("abs_tol", "rel_tol", "min_step", "singularity_clearance"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"Tolerances.{name} must be positive and finite, got {value!r}")

    def scaled(self, factor: float) -> "Tolerances":
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)

    @classmethod
    def for_points(cls, points: Iterable[complex], **kwargs) -> "Tolerances":
        """Default tolerances with clearance set to 1e-3 of the configuration diameter."""
        pts = np.asarray([complex(p) for p in points])
        diam = float(np.max(np.abs(pts[:, None] - pts[None, :]))) if len(pts) > 1 else 1.0
        kwargs.setdefault("singularity_clearance", 1e-3 * max(diam, 1e-12))
        return cls(**kwargs)


# --------------------------------------------------------------------------
# geometry
# --------------------------------------------------------------------------

_REL_MATCH = 1e-12


def _close(a: complex, b: complex, scale: float = 1.0) -> bool:
    return abs(a - b) <= _REL_MATCH * max(1.0, abs(a), abs(b), scale)


@dataclass(frozen=True)
class PathSegment:
    """A line or circular arc.  Arcs carry their centre and signed sweep."""

    kind: str
    start: complex
    end: complex
    center: complex | None = None
    sweep: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "start", complex(self.start))
        object.__setattr__(self, "end", complex(self.end))
        if not (np.isfinite(self.start) and np.isfinite(self.end)):
            raise ValueError("segment endpoints must be finite")
        if self.kind == "line":
            if abs(self.end - self.start) == 0.0:
                raise ValueError("line segment has zero length")
        elif self.kind == "arc":
            if self.center is None or self.sweep is None:
                raise ValueError("arc needs center and sweep")
            object.__setattr__(self, "center", complex(self.center))
            object.__setattr__(self, "sweep", float(self.sweep))
            r = abs(self.start - self.center)
            if r <= 0:
                raise ValueError("arc radius must be positive")
            if self.sweep == 0.0:
                raise ValueError("arc sweep must be nonzero")
            expected = self.center + (self.start - self.center) * np.exp(1j * self.sweep)
            if abs(expected - self.end) > 1e-12 * max(1.0, r, abs(self.center)) * 10:
                raise ValueError("arc end does not lie on the circle at the given sweep")
        else:
            raise ValueError(f"unknown segment kind {self.kind!r}")

    @property
    def radius(self) -> float:
        return abs(self.start - self.center)

    @property
    def length(self) -> float:
        if self.kind == "line":
            return abs(self.end - self.start)
        return self.radius * abs(self.sweep)

    def point(self, s):
        """Position at parameter ``s`` in [0, 1] (vectorised)."""
        if self.kind == "line":
            return self.start + (self.end - self.start) * s
        return self.center + (self.start - self.center) * np.exp(1j * self.sweep * s)

    def velocity(self, s):
        """dx/ds."""
        if self.kind == "line":
            return (self.end - self.start) + 0 * s
        return 1j * self.sweep * (self.start - self.center) * np.exp(1j * self.sweep * s)

    def reversed(self) -> "PathSegment":
        if self.kind == "line":
            return PathSegment("line", self.end, self.start)
        return PathSegment("arc", self.end, self.start, self.center, -self.sweep)

    def split(self, s: float) -> tuple["PathSegment", "PathSegment"]:
        if not 0.0 < s < 1.0:
            raise ValueError("split parameter must lie strictly inside (0, 1)")
        mid = complex(self.point(s))
        if self.kind == "line":
            return PathSegment("line", self.start, mid), PathSegment("line", mid, self.end)
        return (
            PathSegment("arc", self.start, mid, self.center, self.sweep * s),
            PathSegment("arc", mid, self.end, self.center, self.sweep * (1 - s)),
        )

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "start": [self.start.real, self.start.imag],
             "end": [self.end.real, self.end.imag]}
        if self.kind == "arc":
            d["center"] = [self.center.real, self.center.imag]
            d["sweep"] = self.sweep
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "PathSegment":
        def c(v):
            return complex(v[0], v[1])

        if d["kind"] == "arc":
            return cls("arc", c(d["start"]), c(d["end"]), c(d["center"]), float(d["sweep"]))
        return cls(d["kind"], c(d["start"]), c(d["end"]))


@dataclass(frozen=True)
class ContourPath:
    segments: tuple[PathSegment, ...]
    closed: bool = False

    def __post_init__(self):
        segs = tuple(self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ValueError("a path needs at least one segment")
        scale = max(abs(s.start) for s in segs)
        for a, b in zip(segs[:-1], segs[1:]):
            if not _close(a.end, b.start, scale):
                raise ValueError(f"segments do not join: {a.end} vs {b.start}")
        if self.closed and not _close(segs[-1].end, segs[0].start, scale):
            raise ValueError("closed path does not return to its start")

    @property
    def start(self) -> complex:
        return self.segments[0].start

    @property
    def end(self) -> complex:
        return self.segments[-1].end

    @property
    def length(self) -> float:
        return sum(s.length for s in self.segments)

    def reversed(self) -> "ContourPath":
        return ContourPath(tuple(s.reversed() for s in reversed(self.segments)), self.closed)

    def then(self, other: "ContourPath") -> "ContourPath":
        closed = _close(other.end, self.start)
        return ContourPath(self.segments + other.segments, closed=closed)

    def rotated(self, seg_index: int, s: float) -> "ContourPath":
        """Closed path restarted at the point ``(seg_index, s)``."""
        if not self.closed:
            raise ValueError("only closed paths can be rotated")
        segs = list(self.segments)
        if s <= 1e-12:
            order = segs[seg_index:] + segs[:seg_index]
            return ContourPath(tuple(order), closed=True)
        if s >= 1.0 - 1e-12:
            return self.rotated((seg_index + 1) % len(segs), 0.0)
        first, second = segs[seg_index].split(s)
        order = [second] + segs[seg_index + 1:] + segs[:seg_index] + [first]
        return ContourPath(tuple(order), closed=True)

    def point_at(self, seg_index: int, s: float) -> complex:
        return complex(self.segments[seg_index].point(s))

    def winding_number(self, point: complex) -> int:
        """Winding number of a closed path about ``point`` (geometric, not analytic)."""
        if not self.closed:
            raise ValueError("winding number needs a closed path")
        pts, _ = flatten(self, max_angle=0.05)
        ang = np.angle((pts[1:] - point) / (pts[:-1] - point))
        return int(round(ang.sum() / (2 * np.pi)))

    def to_list(self) -> list[dict]:
        return [s.to_dict() for s in self.segments]

    @classmethod
    def from_list(cls, data: Sequence[dict], closed: bool | None = None) -> "ContourPath":
        segs = tuple(PathSegment.from_dict(d) for d in data)
        if closed is None:
            closed = _close(segs[-1].end, segs[0].start)
        return cls(segs, closed=closed)


def line(a: complex, b: complex) -> ContourPath:
    return ContourPath((PathSegment("line", a, b),))


def arc(center: complex, start: complex, sweep: float) -> ContourPath:
    center = complex(center)
    end = center + (complex(start) - center) * np.exp(1j * sweep)
    closed = abs(abs(sweep) - 2 * np.pi) < 1e-15
    if closed:
        end = complex(start)
    return ContourPath((PathSegment("arc", start, end, center, sweep),), closed=closed)


def circle(center: complex, radius: float, start_angle: float = 0.0, ccw: bool = True) -> ContourPath:
    start = complex(center) + radius * np.exp(1j * start_angle)
    return arc(center, start, 2 * np.pi if ccw else -2 * np.pi)


def polyline(points: Sequence[complex], closed: bool = False) -> ContourPath:
    pts = [complex(p) for p in points]
    if closed and not _close(pts[0], pts[-1]):
        pts.append(pts[0])
    segs = []
    for a, b in zip(pts[:-1], pts[1:]):
        if abs(b - a) > 0:
            segs.append(PathSegment("line", a, b))
    if closed:
        last = segs[-1]
        segs[-1] = PathSegment("line", last.start, segs[0].start)
    return ContourPath(tuple(segs), closed=closed)


def flatten(path: ContourPath, max_angle: float = 0.02) -> tuple[np.ndarray, np.ndarray]:
    """Polyline approximation of ``path``.

    Returns the vertices and, for each vertex, the exact location encoded as
    ``segment_index + s``.  Only used for geometric queries.
    """
    pts = []
    loc = []
    for i, seg in enumerate(path.segments):
        if seg.kind == "line":
            ss = np.array([0.0])
        else:
            m = max(2, int(math.ceil(abs(seg.sweep) / max_angle)))
            ss = np.arange(m) / m
        pts.append(seg.point(ss))
        loc.append(i + ss)
    pts.append(np.array([path.end]))
    loc.append(np.array([float(len(path.segments))]))
    return np.concatenate(pts).astype(complex), np.concatenate(loc)


def _segment_point_distance(seg: PathSegment, p: complex) -> float:
    if seg.kind == "line":
        d = seg.end - seg.start
        s = ((p - seg.start) * d.conjugate()).real / abs(d) ** 2
        s = min(1.0, max(0.0, s))
        return abs(seg.start + s * d - p)
    r = seg.radius
    rel = p - seg.center
    best = min(abs(seg.start - p), abs(seg.end - p))
    if abs(rel) == 0:
        return r
    theta0 = np.angle(seg.start - seg.center)
    phi = np.angle(rel)
    # angle of p measured from the arc start in the sweep direction
    delta = (phi - theta0) * np.sign(seg.sweep)
    delta = delta % (2 * np.pi)
    if delta <= abs(seg.sweep) + 1e-15:
        best = min(best, abs(abs(rel) - r))
    return float(best)


def min_distance(path: ContourPath, points: Iterable[complex]) -> float:
    """Exact minimum distance from the path to a finite point set."""
    pts = [complex(p) for p in points]
    if not pts:
        return math.inf
    return min(_segment_point_distance(seg, p) for seg in path.segments for p in pts)


# --------------------------------------------------------------------------
# Dormand-Prince 5(4)
# --------------------------------------------------------------------------

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4
_AL = [[float(a) for a in row] for row in _A]
_CL = [float(c) for c in _C]
_B5L = [float(b) for b in _B5]
_EL = [float(e) for e in _E]


def integrate_path(
    rhs: Callable[[complex, np.ndarray], np.ndarray],
    y0,
    path: ContourPath,
    tol: Tolerances | None = None,
    singularities: Iterable[complex] = (),
    observer: Callable[[complex, np.ndarray], None] | None = None,
    max_step: float | None = None,
    mesh: Sequence[np.ndarray] | None = None,
    record: list | None = None,
) -> np.ndarray:
    """Integrate dy/dx = rhs(x, y) along ``path``; return y at the end.

    The local error per unit length is held below
    ``max(abs_tol, rel_tol * |y|)``.  ``observer`` (if given) is called at
    every accepted node, including the start.

    ``record`` collects the accepted nodes of each segment; passing them back
    as ``mesh`` replays exactly the same steps without error control.  A frozen
    mesh makes the discrete solution a smooth function of any parameters in
    ``rhs``, which is what finite differences in moduli need.
    """
    tol = tol or Tolerances()
    sing = [complex(p) for p in singularities]
    if sing:
        d = min_distance(path, sing)
        if d < tol.singularity_clearance:
            raise SingularityTooClose(
                f"path passes within {d:.3e} of a singularity (clearance {tol.singularity_clearance:.3e})"
            )
    if mesh is not None and len(mesh) != len(path.segments):
        raise ValueError("mesh does not match the number of path segments")
    y = np.array(y0, dtype=complex).copy()
    if observer is not None:
        observer(path.start, y.copy())
    for i, seg in enumerate(path.segments):
        if mesh is not None:
            y = _replay_segment(rhs, y, seg, np.asarray(mesh[i]), observer)
            if record is not None:
                record.append(np.asarray(mesh[i]))
        else:
            nodes = [0.0] if record is not None else None
            y = _integrate_segment(rhs, y, seg, tol, observer, max_step, nodes)
            if record is not None:
                record.append(np.asarray(nodes))
    return y


def _segment_rhs(rhs, seg):
    if seg.kind == "line":
        a, d = seg.start, seg.end - seg.start

        def f(sv, yv):
            return rhs(a + d * sv, yv) * d
    else:
        c, r0, w = seg.center, seg.start - seg.center, 1j * seg.sweep

        def f(sv, yv):
            e = r0 * cmath.exp(w * sv)
            return rhs(c + e, yv) * (w * e)
    return f


def _dp_step(f, s, y, k0, h):
    k = [k0, None, None, None, None, None, None]
    for i in range(1, 7):
        yi = y
        for j, a in enumerate(_AL[i]):
            if a != 0.0:
                yi = yi + (h * a) * k[j]
        k[i] = f(s + _CL[i] * h, yi)
    b, e = _B5L, _EL
    y_new = y + h * (b[0] * k[0] + b[2] * k[2] + b[3] * k[3] + b[4] * k[4] + b[5] * k[5])
    err = h * (e[0] * k[0] + e[2] * k[2] + e[3] * k[3] + e[4] * k[4] + e[5] * k[5] + e[6] * k[6])
    return y_new, err, k[6]


def _replay_segment(rhs, y, seg, nodes, observer):
    f = _segment_rhs(rhs, seg)
    k0 = f(nodes[0], y)
    for s0, s1 in zip(nodes[:-1], nodes[1:]):
        y, _, k0 = _dp_step(f, s0, y, k0, s1 - s0)
        if observer is not None:
            observer(complex(seg.point(s1)), y.copy())
    return y


def _integrate_segment(rhs, y, seg, tol, observer, max_step, nodes=None):
    L = seg.length
    s = 0.0
    err_prev = 1e-4
    # nominal first step: a fixed fraction of the segment, refined by the controller
    h = 0.05 if seg.kind == "line" else min(1.0, 0.2 / max(abs(seg.sweep), 1e-3))
    hmax = 1.0 if max_step is None else max(max_step / L, 1e-12)
    h = min(h, hmax)
    f = _segment_rhs(rhs, seg)
    k0 = f(s, y)
    while s < 1.0:
        last = s + h >= 1.0
        s_next = 1.0 if last else s + h
        # the step actually taken is s_next - s, which a replay reproduces exactly
        h = s_next - s
        y_new, err, k6 = _dp_step(f, s, y, k0, h)
        if not np.all(np.isfinite(y_new)) or not np.all(np.isfinite(err)):
            if h * L < tol.min_step:
                raise NonFiniteValue("non-finite value during integration")
            h *= 0.25
            continue
        scale = max(tol.abs_tol, tol.rel_tol * max(np.max(np.abs(y)), np.max(np.abs(y_new))))
        ratio = float(np.max(np.abs(err))) / (scale * h * L)
        if ratio <= 1.0:
            s = s_next
            y = y_new
            k0 = k6
            if nodes is not None:
                nodes.append(s)
            if observer is not None:
                observer(complex(seg.point(s)), y.copy())
            fac = 0.9 * max(ratio, 1e-10) ** (-0.7 / 4) * err_prev ** (0.4 / 4)
            err_prev = max(ratio, 1e-4)
            h = h * min(4.0, max(0.2, fac))
        else:
            h = h * max(0.1, 0.9 * ratio ** (-1 / 4))
        h = min(h, hmax)
        if h * L < tol.min_step and s < 1.0:
            raise StepUnderflow(f"step {h * L:.3e} below min_step {tol.min_step:.3e}")
    return y


def integrate_transfer(
    coeff: Callable[[complex], np.ndarray],
    path: ContourPath,
    tol: Tolerances | None = None,
    singularities: Iterable[complex] = (),
) -> np.ndarray:
    """Transfer matrix T of dY/dx = C(x) Y along ``path``: Y(end) = T Y(start)."""

    def rhs(x, y):
        C = np.asarray(coeff(x), dtype=complex)
        if not np.all(np.isfinite(C)):
            raise NonFiniteValue(f"coefficient not finite at {x}")
        Y = y.reshape(2, 2)
        return (C @ Y).ravel()

    y = integrate_path(rhs, np.eye(2, dtype=complex).ravel(), path, tol, singularities)
    return y.reshape(2, 2)


def contour_integral(
    f: Callable[[complex], complex],
    path: ContourPath,
    tol: Tolerances | None = None,
    singularities: Iterable[complex] = (),
) -> complex:
    """Line integral of ``f(x) dx`` along ``path``."""

    def rhs(x, y):
        val = complex(f(x))
        if not math.isfinite(val.real) or not math.isfinite(val.imag):
            raise NonFiniteValue(f"integrand not finite at {x}")
        return np.array([val])

    return complex(integrate_path(rhs, np.zeros(1, dtype=complex), path, tol, singularities)[0])


# --------------------------------------------------------------------------
# square roots of polynomials along paths
# --------------------------------------------------------------------------


def _sqrt_poly(leading: complex, roots: np.ndarray, x: complex) -> complex:
    return complex(np.sqrt(leading * np.prod(x - roots)))


def sqrt_continuation(
    branch_points: Sequence[complex],
    leading: complex,
    path: ContourPath,
    initial_sign: int = 1,
    tol: Tolerances | None = None,
    max_arg_step: float = np.pi / 8,
) -> tuple[list[complex], int]:
    """Continue w = sqrt(leading * prod(x - b)) along ``path``.

    Starts from ``initial_sign`` times the principal value.  Returns the
    sampled determinations and the sign relating the final determination to
    the principal value at the end point.
    """
    tol = tol or Tolerances()
    if initial_sign not in (1, -1):
        raise ValueError("initial_sign must be +1 or -1")
    roots = np.asarray([complex(b) for b in branch_points])
    d = min_distance(path, roots) if len(roots) else math.inf
    if d < tol.singularity_clearance:
        raise SingularityTooClose(f"path passes within {d:.3e} of a branch point")
    samples = []
    for seg_idx, seg in enumerate(path.segments):
        s_nodes = _certified_nodes(seg, roots, max_arg_step, tol)
        xs = seg.point(s_nodes)
        start = 1 if seg_idx > 0 else 0
        for x in xs[start:]:
            w = _sqrt_poly(leading, roots, x)
            if not samples:
                w = initial_sign * w
            else:
                prev = samples[-1]
                if abs(w - prev) > abs(w + prev):
                    w = -w
                if abs(np.angle(w / prev)) >= np.pi / 2:
                    raise StepUnderflow("continuation sampling too coarse to certify continuity")
            samples.append(w)
    principal_end = _sqrt_poly(leading, roots, path.end)
    final_sign = 1 if abs(samples[-1] - principal_end) <= abs(samples[-1] + principal_end) else -1
    return samples, final_sign


def _certified_nodes(seg: PathSegment, roots: np.ndarray, max_arg: float, tol: Tolerances) -> np.ndarray:
    """Nodes on [0, 1] such that arg(w) changes by less than ``max_arg`` between neighbours."""
    nodes = [0.0]
    s = 0.0
    L = seg.length
    while s < 1.0:
        x = complex(seg.point(s))
        dist = np.min(np.abs(x - roots)) if len(roots) else math.inf
        # |d arg w| <= sum |dx| / (2 |x - b|); bound it by the nearest root
        speed = len(roots) / (2 * dist) if len(roots) else 0.0
        ds = max_arg / (speed * L) if speed > 0 else 1.0
        ds = min(ds, 0.05)
        if ds * L < tol.min_step:
            raise StepUnderflow("sampling step below min_step near a branch point")
        s = min(1.0, s + ds)
        nodes.append(s)
    return np.asarray(nodes)


# --------------------------------------------------------------------------
# polynomials and small linear algebra
# --------------------------------------------------------------------------


def polynomial_roots(coeffs: Sequence[complex], simple_tol: float = 1e-7) -> list[complex]:
    """Roots of a polynomial given highest-degree-first coefficients.

    Companion-matrix eigenvalues followed by Newton polishing.  A root that
    is multiple to within ``simple_tol`` (relative) raises
    :class:`MultipleRootError`.
    """
    c = np.asarray(coeffs, dtype=complex)
    if c.size == 0 or c[0] == 0:
        raise ValueError("leading coefficient must be nonzero")
    deg = c.size - 1
    if deg > 64:
        raise ValueError("degree above 64 is not supported")
    if deg == 0:
        return []
    roots = np.roots(c)
    dc = np.polyder(c)
    polished = []
    for r in roots:
        for _ in range(4):
            p = np.polyval(c, r)
            dp = np.polyval(dc, r)
            if dp == 0:
                break
            step = p / dp
            r = r - step
            if abs(step) <= 1e-16 * max(1.0, abs(r)):
                break
        polished.append(complex(r))
    scale = max(1.0, max(abs(r) for r in polished))
    for i in range(deg):
        for j in range(i + 1, deg):
            if abs(polished[i] - polished[j]) <= simple_tol * scale:
                raise MultipleRootError(f"roots {polished[i]} and {polished[j]} coincide within tolerance")
    return polished


def matrix_exponential(M: np.ndarray, squarings: int | None = None) -> np.ndarray:
    """Scaling-and-squaring Taylor exponential; kept independent of the integrator."""
    M = np.asarray(M, dtype=complex)
    norm = np.max(np.sum(np.abs(M), axis=1))
    s = squarings if squarings is not None else max(0, int(math.ceil(math.log2(max(norm, 1e-300)))) + 4)
    A = M / 2**s
    E = np.eye(M.shape[0], dtype=complex)
    term = np.eye(M.shape[0], dtype=complex)
    for k in range(1, 30):
        term = term @ A / k
        E = E + term
    for _ in range(s):
        E = E @ E
    return E
