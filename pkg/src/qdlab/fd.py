"""Finite-difference derivatives in complex parameters."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["FDResult", "central", "richardson", "holomorphic_derivative"]


@dataclass(frozen=True)
class FDResult:
    value: np.ndarray | complex
    error_estimate: float
    cr_residual: float = 0.0


def central(f: Callable, x0: complex, h: complex):
    return (np.asarray(f(x0 + h)) - np.asarray(f(x0 - h))) / (2 * h)


def richardson(f: Callable, x0: complex, h: complex) -> FDResult:
    """Central differences at h and h/2 combined to fourth order."""
    d1 = central(f, x0, h)
    d2 = central(f, x0, h / 2)
    value = (4 * d2 - d1) / 3
    return FDResult(value, float(np.max(np.abs(d2 - d1))) / 3)


def holomorphic_derivative(f: Callable, x0: complex, h: float) -> FDResult:
    """Richardson derivative along the real and the imaginary direction.

    For a holomorphic f the two agree; their difference is reported as the
    Cauchy-Riemann residual (relative to the derivative's size).
    """
    real = richardson(f, x0, h)
    imag = richardson(f, x0, 1j * h)
    scale = max(float(np.max(np.abs(real.value))), 1e-300)
    cr = float(np.max(np.abs(np.asarray(real.value) - np.asarray(imag.value)))) / scale
    return FDResult(real.value, max(real.error_estimate, imag.error_estimate), cr)
