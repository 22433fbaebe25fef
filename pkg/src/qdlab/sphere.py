"""The punctured Riemann sphere and quadratic differentials with simple poles.

A quadratic differential is stored in the x-chart as ``Q(x) = N(x) / D(x)``
where ``D`` is the monic product over the finite punctures.  The point at
infinity is the sentinel :data:`INF`; when it is a puncture the pole there is
simple iff ``deg N = (number of finite punctures) - 3``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .contour import polynomial_roots

__all__ = [
    "INF",
    "is_inf",
    "PuncturedSphere",
    "QuadDiff",
    "HeunParameters",
    "ThirdKindDifferential",
    "CotangentChart",
    "heun_Q",
    "basis_Qk",
    "coordinates_q",
    "cross_ratio",
    "decompose",
    "schwarzian_v",
    "potential_u",
    "potential_u_derivative",
    "bergman_B",
    "h_kernel",
    "third_kind_W",
    "build_chart",
    "chart_quaddiff",
]


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(p) -> bool:
    return p is INF or (isinstance(p, str) and p.lower() == "inf")


def _pt(p):
    return INF if is_inf(p) else complex(p)


FOUR_PI_I = 4j * math.pi


@dataclass(frozen=True)
class PuncturedSphere:
    punctures: tuple

    def __post_init__(self):
        pts = tuple(_pt(p) for p in self.punctures)
        object.__setattr__(self, "punctures", pts)
        if len(pts) < 4:
            raise ValueError(f"need at least 4 punctures, got {len(pts)}")
        if sum(1 for p in pts if p is INF) > 1:
            raise ValueError("at most one puncture may be at infinity")
        finite = [p for p in pts if p is not INF]
        for p in finite:
            if not (math.isfinite(p.real) and math.isfinite(p.imag)):
                raise ValueError("puncture coordinates must be finite")
        scale = max([1.0] + [abs(p) for p in finite])
        for i, a in enumerate(finite):
            for b in finite[i + 1:]:
                if abs(a - b) <= 1e-12 * scale:
                    raise ValueError(f"punctures {a} and {b} coincide")

    @property
    def n(self) -> int:
        return len(self.punctures)

    @property
    def finite(self) -> list[complex]:
        return [p for p in self.punctures if p is not INF]

    @property
    def has_infinity(self) -> bool:
        return any(p is INF for p in self.punctures)

    def denominator(self) -> np.ndarray:
        """Coefficients (highest first) of the monic product over finite punctures."""
        return np.poly(np.asarray(self.finite, dtype=complex)) if self.finite else np.array([1.0 + 0j])


@dataclass(frozen=True)
class QuadDiff:
    """``Q(x) (dx)^2 = N(x) / prod(x - y_finite) (dx)^2`` on a punctured sphere.

    Poles sit where ``N`` does not cancel the denominator.  The stricter
    requirement of a simple pole at every puncture is checked by
    :meth:`check_simple`, which the cover construction calls.
    """

    base: PuncturedSphere
    numerator: tuple

    def __post_init__(self):
        num = np.atleast_1d(np.asarray(self.numerator, dtype=complex))
        nz = np.flatnonzero(num != 0)
        num = num[nz[0]:] if nz.size else np.array([0j])
        object.__setattr__(self, "numerator", tuple(complex(c) for c in num))
        if not np.all(np.isfinite(num)):
            raise ValueError("numerator coefficients must be finite")
        nf = len(self.base.finite)
        limit = nf - 3 if self.base.has_infinity else nf - 4
        if not self.is_zero and self.degree > limit:
            raise ValueError(
                f"numerator degree {self.degree} exceeds {limit}: Q would have a pole of order > 1 at infinity"
            )

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.numerator)

    @property
    def degree(self) -> int:
        return -1 if self.is_zero else len(self.numerator) - 1

    @cached_property
    def _num(self) -> np.ndarray:
        return np.asarray(self.numerator, dtype=complex)

    @cached_property
    def _poles(self) -> np.ndarray:
        return np.asarray(self.base.finite, dtype=complex)

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        den = np.ones_like(x)
        for y in self._poles:
            den = den * (x - y)
        out = np.polyval(self._num, x) / den
        return complex(out) if out.ndim == 0 else out

    def at_infinity(self, xi):
        """Q in the chart xi = 1/x: Q(1/xi) / xi^4."""
        xi = np.asarray(xi, dtype=complex)
        return self(1 / xi) / xi**4

    def __add__(self, other: "QuadDiff") -> "QuadDiff":
        if other.base != self.base:
            raise ValueError("cannot add quadratic differentials on different spheres")
        return QuadDiff(self.base, tuple(np.polyadd(self._num, other._num)))

    def __mul__(self, c) -> "QuadDiff":
        return QuadDiff(self.base, tuple(complex(c) * self._num))

    __rmul__ = __mul__

    @cached_property
    def zeros(self) -> list[complex]:
        """Simple zeros of Q (roots of the numerator)."""
        if self.is_zero:
            raise ValueError("the zero differential has no isolated zeros")
        return polynomial_roots(self._num)

    def pole_at_infinity(self) -> bool:
        return (not self.is_zero) and self.base.has_infinity and self.degree == len(self.base.finite) - 3

    def check_simple(self, rel_tol: float = 1e-9) -> None:
        """Raise unless every puncture is a simple pole and all zeros are simple and off the punctures."""
        if self.is_zero:
            raise ValueError("Q is identically zero")
        nf = len(self.base.finite)
        if self.base.has_infinity and self.degree != nf - 3:
            raise ValueError("Q does not have a simple pole at infinity")
        if not self.base.has_infinity and self.degree != nf - 4:
            raise ValueError("Q has a zero at infinity; move it to a finite point")
        scale = max([1.0] + [abs(p) for p in self._poles])
        for z in self.zeros:
            for y in self._poles:
                if abs(z - y) <= rel_tol * scale:
                    raise ValueError(f"zero {z} collides with puncture {y}")

    def log_derivatives(self, x: complex) -> tuple[complex, complex, complex]:
        """L = Q'/Q and its first two derivatives, from the zero/pole factorisation."""
        x = complex(x)
        L = L1 = L2 = 0j
        for z in self.zeros:
            d = 1 / (x - z)
            L += d
            L1 -= d * d
            L2 += 2 * d * d * d
        for y in self._poles:
            d = 1 / (x - y)
            L -= d
            L1 += d * d
            L2 -= 2 * d * d * d
        return L, L1, L2

    def to_dict(self) -> dict:
        pts = ["inf" if p is INF else [p.real, p.imag] for p in self.base.punctures]
        return {"punctures": pts, "numerator": [[c.real, c.imag] for c in self.numerator]}

    @classmethod
    def from_dict(cls, d: dict) -> "QuadDiff":
        pts = [INF if is_inf(p) else complex(p[0], p[1]) for p in d["punctures"]]
        num = [complex(c[0], c[1]) for c in d["numerator"]]
        return cls(PuncturedSphere(tuple(pts)), tuple(num))


@dataclass(frozen=True)
class HeunParameters:
    """The (t, mu) chart for four punctures {0, 1, t, inf}.

    ``mu = 0`` is accepted so that degenerate checks (trivial monodromy) can
    be run; everything needing the cover rejects it later.
    """

    t: complex
    mu: complex
    max_modulus: float = 1e6

    def __post_init__(self):
        object.__setattr__(self, "t", complex(self.t))
        object.__setattr__(self, "mu", complex(self.mu))
        t = self.t
        if not (math.isfinite(t.real) and math.isfinite(t.imag) and math.isfinite(abs(self.mu))):
            raise ValueError("t and mu must be finite")
        if abs(t) > self.max_modulus or abs(t) * self.max_modulus < 1 or abs(t - 1) * self.max_modulus < 1:
            raise ValueError(f"t = {t} is too close to 0, 1 or infinity")

    @property
    def base(self) -> PuncturedSphere:
        return PuncturedSphere((0j, 1 + 0j, self.t, INF))


def heun_Q(params: HeunParameters) -> QuadDiff:
    """Q = mu / (x (x - 1) (x - t)) on the punctures {0, 1, t, inf}."""
    return QuadDiff(params.base, (params.mu,))


@dataclass(frozen=True)
class ThirdKindDifferential:
    """W_ab = (1/(x - a) - 1/(x - b)) dx with residues +1 at a and -1 at b."""

    a: object
    b: object

    def __post_init__(self):
        a, b = _pt(self.a), _pt(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if a is INF and b is INF or (a is not INF and b is not INF and a == b):
            raise ValueError("third-kind differential needs two distinct poles")

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = 0
        if self.a is not INF:
            out = out + 1 / (x - self.a)
        if self.b is not INF:
            out = out - 1 / (x - self.b)
        return complex(out) if np.ndim(out) == 0 else out


def third_kind_W(a, b) -> ThirdKindDifferential:
    return ThirdKindDifferential(a, b)


def _w_factor(a, b):
    """W_ab = c / prod(x - finite poles): returns (c, finite poles)."""
    if a is INF:
        return -1.0 + 0j, [b]
    if b is INF:
        return 1.0 + 0j, [a]
    return a - b, [a, b]


def _others(base: PuncturedSphere, roles) -> list:
    roles = [_pt(r) for r in roles]
    if len(roles) != 3:
        raise ValueError("roles must name three punctures (y1, y2, y3)")
    for r in roles:
        if r not in base.punctures:
            raise ValueError(f"role point {r} is not a puncture")
    if len({repr(r) for r in roles}) != 3:
        raise ValueError("role points must be distinct")
    return [p for p in base.punctures if p not in roles]


def basis_Qk(base: PuncturedSphere, roles, k: int) -> QuadDiff:
    """Q_k = W_{y1 y2} W_{y3 y_{k+3}} / (4 pi i), as a differential on ``base``.

    The punctures other than the three roles are taken in base order as
    y4, y5, ...; ``k`` runs from 1 to n - 3.
    """
    others = _others(base, roles)
    if not 1 <= k <= len(others):
        raise ValueError(f"k must lie in 1..{len(others)}")
    y1, y2, y3 = (_pt(r) for r in roles)
    yk = others[k - 1]
    c1, p1 = _w_factor(y1, y2)
    c2, p2 = _w_factor(y3, yk)
    poles = p1 + p2
    # numerator over the full denominator: constant times the missing finite factors
    missing = list(base.finite)
    for p in poles:
        missing.remove(p)
    num = (c1 * c2 / FOUR_PI_I) * np.poly(np.asarray(missing, dtype=complex)) if missing else np.array([c1 * c2 / FOUR_PI_I])
    return QuadDiff(base, tuple(num))


def basis_Qk_product(base: PuncturedSphere, roles, k: int, x):
    """Direct product-of-W evaluation of Q_k, kept separate from :func:`basis_Qk`."""
    others = _others(base, roles)
    y1, y2, y3 = (_pt(r) for r in roles)
    return third_kind_W(y1, y2)(x) * third_kind_W(y3, others[k - 1])(x) / FOUR_PI_I


def cross_ratio(y4, y1, y3, y2) -> complex:
    """(y4 - y1)(y3 - y2) / ((y3 - y1)(y4 - y2)); factors containing INF cancel in pairs."""
    num = [(y4, y1), (y3, y2)]
    den = [(y3, y1), (y4, y2)]
    value = 1 + 0j
    for a, b in num:
        if a is not INF and b is not INF:
            value *= a - b
    for a, b in den:
        if a is not INF and b is not INF:
            value /= a - b
    return value


def coordinates_q(base: PuncturedSphere, roles) -> list[complex]:
    """q_k = log of the cross-ratio of (y_{k+3}, y1, y3, y2), principal branch."""
    others = _others(base, roles)
    y1, y2, y3 = (_pt(r) for r in roles)
    out = []
    for yk in others:
        cr = cross_ratio(yk, y1, y3, y2)
        if cr == 0 or not np.isfinite(cr):
            raise ValueError("degenerate cross-ratio")
        out.append(complex(np.log(cr)))
    return out


def _probe_points(base: PuncturedSphere, count: int, rng: np.random.Generator) -> np.ndarray:
    finite = np.asarray(base.finite, dtype=complex)
    center = finite.mean() if finite.size else 0j
    spread = max(1.0, float(np.max(np.abs(finite - center)))) if finite.size else 1.0
    pts = []
    while len(pts) < count:
        x = center + spread * (rng.normal() + 1j * rng.normal())
        if finite.size == 0 or np.min(np.abs(x - finite)) > 0.05 * spread:
            pts.append(x)
    return np.asarray(pts)


def decompose(Q: QuadDiff, basis: Sequence[QuadDiff], seed: int = 0, rel_tol: float = 1e-10) -> np.ndarray:
    """Coefficients p with Q = sum p_k Q_k, from evaluations at probe points.

    The square system uses len(basis) probes; 20 further probes validate the
    result.  Ill-conditioned probe sets are redrawn up to five times.
    """
    m = len(basis)
    rng = np.random.default_rng(seed)
    for _ in range(6):
        xs = _probe_points(Q.base, m, rng)
        M = np.array([[Qk(x) for Qk in basis] for x in xs])
        if np.linalg.cond(M) > 1e10:
            continue
        p = np.linalg.solve(M, np.array([Q(x) for x in xs]))
        check = _probe_points(Q.base, 20, rng)
        recon = np.array([sum(pk * Qk(x) for pk, Qk in zip(p, basis)) for x in check])
        target = np.array([Q(x) for x in check])
        scale = max(np.max(np.abs(target)), np.max(np.abs([[Qk(x) for Qk in basis] for x in check])))
        if np.max(np.abs(recon - target)) > rel_tol * scale:
            raise ValueError("Q is not in the span of the basis (probe residual too large)")
        return p
    raise ValueError("could not find a well-conditioned probe set")


def schwarzian_v(Q: QuadDiff, x: complex) -> complex:
    """S_v = (v'/v)' - (v'/v)^2 / 2 with v'/v = Q'/(2Q)."""
    L, L1, _ = Q.log_derivatives(x)
    return L1 / 2 - L * L / 8


def potential_u(Q: QuadDiff, x: complex) -> complex:
    """u = S_v / (2 Q) - 1 in the x-chart, where the Bergman projective connection vanishes."""
    if Q.is_zero:
        raise ValueError("u is undefined for Q = 0")
    return schwarzian_v(Q, x) / (2 * Q(x)) - 1


def potential_u_derivative(Q: QuadDiff, x: complex) -> complex:
    """du/dx = (S_v' - S_v L) / (2 Q)."""
    L, L1, L2 = Q.log_derivatives(x)
    S = L1 / 2 - L * L / 8
    S1 = L2 / 2 - L * L1 / 4
    return (S1 - S * L) / (2 * Q(x))


def bergman_B(x: complex, y: complex) -> complex:
    """Scalar part of the genus-0 Bergman bidifferential dx dy / (x - y)^2."""
    if x == y:
        raise ValueError("B is singular on the diagonal")
    return 1 / (x - y) ** 2


def h_kernel(Q: QuadDiff, x: complex, y: complex) -> complex:
    """h(x, y) = B(x, y)^2 / (Q(x) Q(y))."""
    return bergman_B(x, y) ** 2 / (Q(x) * Q(y))


@dataclass(frozen=True)
class CotangentChart:
    """Point (q, p) of the cotangent bundle with its basis differentials."""

    q: tuple
    p: tuple
    basis: tuple
    roles: tuple
    Q: QuadDiff = field(repr=False)

    def reconstruct(self) -> QuadDiff:
        out = self.basis[0] * self.p[0]
        for pk, Qk in zip(self.p[1:], self.basis[1:]):
            out = out + Qk * pk
        return out

    def probe_residual(self, probes: int = 20, seed: int = 1) -> float:
        rng = np.random.default_rng(seed)
        xs = _probe_points(self.Q.base, probes, rng)
        recon = self.reconstruct()
        return max(abs(recon(x) - self.Q(x)) / max(abs(self.Q(x)), 1e-300) for x in xs)


def build_chart(Q: QuadDiff, roles=None) -> CotangentChart:
    """Coordinates and momenta of Q.  Default roles: (first finite, INF or last, next finite)."""
    base = Q.base
    if roles is None:
        finite = base.finite
        y2 = INF if base.has_infinity else finite[-1]
        roles = (finite[0], y2, finite[1])
    roles = tuple(_pt(r) for r in roles)
    others = _others(base, roles)
    basis = tuple(basis_Qk(base, roles, k) for k in range(1, len(others) + 1))
    p = decompose(Q, basis)
    q = coordinates_q(base, roles)
    return CotangentChart(tuple(q), tuple(complex(v) for v in p), basis, roles, Q)


def chart_quaddiff(p: Sequence[complex], q: Sequence[complex]) -> QuadDiff:
    """Q = sum p_k Q_k on the normalised sphere (0, 1, e^{q_1}, ..., INF) with roles (0, INF, 1)."""
    ys = [complex(np.exp(qk)) for qk in q]
    base = PuncturedSphere(tuple([0j, 1 + 0j] + ys + [INF]))
    roles = (0j, INF, 1 + 0j)
    out = None
    for k, pk in enumerate(p, start=1):
        term = basis_Qk(base, roles, k) * pk
        out = term if out is None else out + term
    return out
