"""JSON reports: encoding of complex numbers and infinity, checks and verdicts."""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .sphere import INF

__all__ = ["SCHEMA_VERSION", "Check", "Report", "encode", "check_close", "check_below"]

SCHEMA_VERSION = 1


def encode(value: Any) -> Any:
    """JSON-ready form: complex -> [re, im], INF and non-finite floats -> "inf"/"nan"."""
    if value is INF:
        return "inf"
    if isinstance(value, dict):
        return {str(k): encode(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [encode(v) for v in value]
    if isinstance(value, np.ndarray):
        return [encode(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_float(value.real), _float(value.imag)]
    if isinstance(value, (float, np.floating)):
        return _float(value)
    return value


def _float(x: float) -> float | str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class Check:
    name: str
    lhs: Any
    rhs: Any
    abs_err: float
    tol: float
    passed: bool
    note: str = ""

    def to_dict(self) -> dict:
        d = {"name": self.name, "lhs": encode(self.lhs), "rhs": encode(self.rhs),
             "abs_err": encode(self.abs_err), "tol": self.tol, "pass": bool(self.passed)}
        if self.note:
            d["note"] = self.note
        return d


def check_close(name: str, lhs, rhs, tol: float, relative: bool = False, note: str = "") -> Check:
    a, b = np.asarray(lhs, dtype=complex), np.asarray(rhs, dtype=complex)
    err = float(np.max(np.abs(a - b))) if a.size else 0.0
    if relative:
        err /= max(float(np.max(np.abs(b))), 1e-300)
    return Check(name, lhs, rhs, err, tol, bool(err < tol), note)


def check_below(name: str, value: float, tol: float, note: str = "") -> Check:
    value = float(value)
    return Check(name, value, 0.0, value, tol, bool(value < tol), note)


@dataclass
class Report:
    command: str
    parameters: dict = field(default_factory=dict)
    conventions: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    results: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)
    _clock: dict = field(default_factory=dict, repr=False)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        return check

    def extend(self, checks) -> None:
        self.checks.extend(checks)

    def start(self, label: str) -> None:
        self._clock[label] = time.perf_counter()

    def stop(self, label: str) -> None:
        self.timings[label] = time.perf_counter() - self._clock.pop(label)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "version": SCHEMA_VERSION,
            "command": self.command,
            "parameters": encode(self.parameters),
            "conventions": encode(self.conventions),
            "checks": [c.to_dict() for c in self.checks],
            "results": encode(self.results),
            "pass": self.passed,
            "timings": self.timings,
        }

    def write(self, path: str | Path | None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=False)
        if path is not None:
            Path(path).write_text(text + "\n")
        return text
