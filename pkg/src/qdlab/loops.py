"""Closed loops in the plane: construction, crossings and sub-paths."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import shapely

from .contour import ContourError, ContourPath, PathSegment, flatten, min_distance, polyline

__all__ = [
    "TangentialIntersection",
    "IntersectionDatum",
    "stadium",
    "sausage",
    "crossings",
    "subpath",
    "point_at_loc",
    "tangent_at_loc",
]


class TangentialIntersection(ContourError):
    pass


@dataclass(frozen=True)
class IntersectionDatum:
    """Transversal crossing of two loops.

    ``loc`` and ``loc_other`` are exact positions as (segment index, s).
    ``nu`` is the sign of the cross product of the first tangent with the second.
    """

    point: complex
    loc: tuple[int, float]
    loc_other: tuple[int, float]
    tangent: complex
    tangent_other: complex
    nu: int

    @property
    def angle(self) -> float:
        return abs(math.asin(max(-1.0, min(1.0, _cross(self.tangent, self.tangent_other)))))


def _cross(a: complex, b: complex) -> float:
    return (a.conjugate() * b).imag


def stadium(a: complex, b: complex, r: float) -> ContourPath:
    """Counter-clockwise stadium of half-width ``r`` around the segment [a, b]."""
    a, b = complex(a), complex(b)
    d = (b - a) / abs(b - a)
    n = 1j * d
    p1, p2, p3, p4 = a - n * r, b - n * r, b + n * r, a + n * r
    return ContourPath(
        (
            PathSegment("line", p1, p2),
            PathSegment("arc", p2, p3, b, math.pi),
            PathSegment("line", p3, p4),
            PathSegment("arc", p4, p1, a, math.pi),
        ),
        closed=True,
    )


def sausage(points, r: float, quad_segs: int = 6) -> ContourPath:
    """Counter-clockwise boundary of the r-neighbourhood of a polyline.

    Two points give an exact stadium; longer chains use the polygonal buffer.
    """
    pts = [complex(p) for p in points]
    if len(pts) == 2:
        return stadium(pts[0], pts[1], r)
    geom = shapely.LineString([(p.real, p.imag) for p in pts]).buffer(r, quad_segs=quad_segs)
    ring = shapely.geometry.polygon.orient(geom, sign=1.0).exterior
    coords = [complex(x, y) for x, y in ring.coords]
    return polyline(coords, closed=True)


def point_at_loc(path: ContourPath, loc: tuple[int, float]) -> complex:
    return complex(path.segments[loc[0]].point(loc[1]))


def tangent_at_loc(path: ContourPath, loc: tuple[int, float]) -> complex:
    v = complex(path.segments[loc[0]].velocity(loc[1]))
    return v / abs(v)


def subpath(path: ContourPath, loc: tuple[int, float]) -> ContourPath | None:
    """The initial part of ``path`` up to ``loc``; None if that is a single point."""
    i, s = loc
    segs = list(path.segments[:i])
    if s >= 1.0 - 1e-12:
        segs.append(path.segments[i])
    elif s > 1e-12:
        segs.append(path.segments[i].split(s)[0])
    return ContourPath(tuple(segs)) if segs else None


def _polyline_params(path: ContourPath, max_angle: float):
    pts, loc = flatten(path, max_angle=max_angle)
    seg = np.minimum(np.floor(loc[:-1]).astype(int), len(path.segments) - 1)
    s0 = loc[:-1] - seg
    s1 = np.where(np.floor(loc[1:]).astype(int) == seg, loc[1:] - seg, 1.0)
    return pts, seg, s0, s1


def _newton(p_seg: PathSegment, q_seg: PathSegment, s: float, u: float):
    for _ in range(8):
        F = complex(p_seg.point(s)) - complex(q_seg.point(u))
        dp = complex(p_seg.velocity(s))
        dq = -complex(q_seg.velocity(u))
        J = np.array([[dp.real, dq.real], [dp.imag, dq.imag]])
        try:
            ds, du = np.linalg.solve(J, [-F.real, -F.imag])
        except np.linalg.LinAlgError:
            break
        s, u = s + ds, u + du
        if abs(ds) + abs(du) < 1e-15:
            break
    return min(1.0, max(0.0, s)), min(1.0, max(0.0, u))


def crossings(
    path: ContourPath, other: ContourPath, min_angle_deg: float = 10.0, max_angle: float = 0.01
) -> list[IntersectionDatum]:
    """All transversal crossings of two paths, refined on the exact segments."""
    P, pseg, ps0, ps1 = _polyline_params(path, max_angle)
    R, rseg, rs0, rs1 = _polyline_params(other, max_angle)
    a, da = P[:-1, None], (P[1:] - P[:-1])[:, None]
    b, db = R[None, :-1], (R[1:] - R[:-1])[None, :]
    den = (da.conj() * db).imag
    rel = b - a
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (rel.conj() * db).imag / den
        u = (rel.conj() * da).imag / den
    parallel = np.abs(den) <= 1e-14 * np.abs(da) * np.abs(db)
    if np.any(parallel):
        # collinear overlapping pieces are not transversal
        dist = np.abs((rel.conj() * da).imag) / np.abs(da)
        overlap = parallel & (dist < 1e-12)
        if np.any(overlap):
            i, j = np.argwhere(overlap)[0]
            t0 = ((R[j] - P[i]) * np.conj(P[i + 1] - P[i])).real / abs(P[i + 1] - P[i]) ** 2
            t1 = ((R[j + 1] - P[i]) * np.conj(P[i + 1] - P[i])).real / abs(P[i + 1] - P[i]) ** 2
            if max(t0, t1) > 0 and min(t0, t1) < 1:
                raise TangentialIntersection("loops overlap along a segment")
    hit = (~parallel) & (s >= 0) & (s < 1) & (u >= 0) & (u < 1)
    out: list[IntersectionDatum] = []
    sin_min = math.sin(math.radians(min_angle_deg))
    for i, j in np.argwhere(hit):
        si = ps0[i] + s[i, j] * (ps1[i] - ps0[i])
        uj = rs0[j] + u[i, j] * (rs1[j] - rs0[j])
        pseg_i, rseg_j = path.segments[pseg[i]], other.segments[rseg[j]]
        si, uj = _newton(pseg_i, rseg_j, si, uj)
        loc, loc_o = _normalise(path, (int(pseg[i]), si)), _normalise(other, (int(rseg[j]), uj))
        p = point_at_loc(path, loc)
        if any(abs(p - d.point) < 1e-9 * max(1.0, abs(p)) for d in out):
            continue
        t1, t2 = tangent_at_loc(path, loc), tangent_at_loc(other, loc_o)
        c = _cross(t1, t2)
        if abs(c) < sin_min:
            raise TangentialIntersection(f"crossing at {p} has angle below {min_angle_deg} degrees")
        out.append(IntersectionDatum(p, loc, loc_o, t1, t2, 1 if c > 0 else -1))
    out.sort(key=lambda d: d.loc)
    return out


def _normalise(path: ContourPath, loc: tuple[int, float]) -> tuple[int, float]:
    i, s = loc
    if s >= 1.0:
        if i + 1 < len(path.segments):
            return i + 1, 0.0
        if path.closed:
            return 0, 0.0
    return i, s


def clearance(path: ContourPath, points) -> float:
    return min_distance(path, points)
