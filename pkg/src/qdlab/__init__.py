"""Quadratic differentials on the punctured sphere: periods, monodromy and brackets."""

from .contour import ContourPath, Tolerances
from .cover import HomologyBasis, build_cover, homology_cycles
from .monodromy import SchroedingerData, phi_transfer, puncture_monodromies
from .sphere import INF, HeunParameters, PuncturedSphere, QuadDiff, heun_Q

__version__ = "0.1.0"

__all__ = [
    "INF",
    "ContourPath",
    "HeunParameters",
    "HomologyBasis",
    "PuncturedSphere",
    "QuadDiff",
    "SchroedingerData",
    "Tolerances",
    "build_cover",
    "heun_Q",
    "homology_cycles",
    "phi_transfer",
    "puncture_monodromies",
]
