"""Run configuration: JSON document plus command-line overrides."""

from __future__ import annotations

import cmath
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .contour import ContourPath, PathSegment, Tolerances
from .sphere import INF, HeunParameters, PuncturedSphere, QuadDiff, heun_Q

__all__ = [
    "ConfigError",
    "RunConfig",
    "parse_complex",
    "parse_point",
    "parse_grid",
    "load_config",
    "load_loop_suite",
    "grid_parameters",
    "random_parameters",
    "FLAGSHIP",
    "SAFE_THETA",
    "SAFE_MU",
    "SAFE_PHASE",
]

FLAGSHIP = HeunParameters(0.31 + 0.27j, 1.0)


class ConfigError(ValueError):
    pass


def parse_complex(value: Any) -> complex:
    """[re, im], a number, or a string such as "0.31+0.27i"."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a complex number, got {value!r}")
    if isinstance(value, (int, float, complex)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    if isinstance(value, str):
        s = value.strip().replace(" ", "").replace("i", "j")
        try:
            return complex(s)
        except ValueError:
            pass
    raise ConfigError(f"cannot read a complex number from {value!r}")


def parse_point(value: Any):
    if isinstance(value, str) and value.strip().lower() == "inf":
        return INF
    return parse_complex(value)


def parse_grid(spec: Any) -> tuple[int, int]:
    """"5x5" or [5, 5] -> (number of t values, number of mu values)."""
    if isinstance(spec, str):
        m = re.fullmatch(r"\s*(\d+)\s*[xX]\s*(\d+)\s*", spec)
        if not m:
            raise ConfigError(f"grid spec {spec!r} is not of the form NxM")
        nt, nm = int(m.group(1)), int(m.group(2))
    elif isinstance(spec, (list, tuple)) and len(spec) == 2:
        nt, nm = int(spec[0]), int(spec[1])
    else:
        raise ConfigError(f"grid spec {spec!r} is not of the form NxM")
    if nt < 1 or nm < 1:
        raise ConfigError("grid sizes must be positive")
    return nt, nm


SAFE_THETA = (math.pi / 3, 2 * math.pi / 3)
SAFE_MU = (0.5, 1.25)
SAFE_PHASE = 0.3


def grid_parameters(nt: int, nm: int) -> list[HeunParameters]:
    """Safe grid: t on an arc of |t - 1/2| = 0.35, |mu| log-spaced with a sweep of its phase.

    The region keeps eps * prod ||M_i|| of the keyhole monodromies near 1e-8,
    so the product relation is not limited by rounding.
    """
    thetas = np.linspace(*SAFE_THETA, nt) if nt > 1 else [math.pi / 2]
    mods = np.geomspace(*SAFE_MU, nm) if nm > 1 else [1.0]
    phases = np.linspace(-SAFE_PHASE, SAFE_PHASE, nm) if nm > 1 else [0.0]
    out = []
    for th in thetas:
        t = 0.5 + 0.35 * cmath.exp(1j * th)
        for r, ph in zip(mods, phases):
            out.append(HeunParameters(t, r * cmath.exp(1j * ph)))
    return out


def random_parameters(count: int, seed: int) -> list[HeunParameters]:
    """Seeded draws from the safe region of :func:`grid_parameters`, either half plane."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        th = rng.uniform(*SAFE_THETA) * rng.choice([-1, 1])
        rho = rng.uniform(0.3, 0.38)
        mod = math.exp(rng.uniform(math.log(SAFE_MU[0]), math.log(SAFE_MU[1])))
        mu = mod * cmath.exp(1j * rng.uniform(-SAFE_PHASE, SAFE_PHASE))
        out.append(HeunParameters(0.5 + rho * cmath.exp(1j * th), mu))
    return out


def load_loop_suite(source: Any, base_dir: Path | None = None) -> list[ContourPath]:
    """A JSON list of loops, each a list of segments {kind, start, end, center?, sweep?}."""
    if isinstance(source, (str, Path)):
        path = Path(source)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read loop suite {path}: {exc}") from exc
    else:
        data = source
    if not isinstance(data, list) or not data:
        raise ConfigError("loop suite must be a non-empty list of loops")
    loops = []
    for k, item in enumerate(data):
        if not isinstance(item, list) or not item:
            raise ConfigError(f"loop {k} must be a non-empty list of segments")
        try:
            loops.append(ContourPath(tuple(_segment(s) for s in item), closed=True))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"loop {k}: {exc}") from exc
    return loops


def _segment(d: dict) -> PathSegment:
    if not isinstance(d, dict) or "kind" not in d:
        raise ConfigError("segment needs a 'kind'")
    start, end = parse_complex(d["start"]), parse_complex(d["end"])
    if d["kind"] == "arc":
        return PathSegment("arc", start, end, parse_complex(d["center"]), float(d["sweep"]))
    if d["kind"] != "line":
        raise ConfigError(f"unknown segment kind {d['kind']!r}")
    return PathSegment("line", start, end)


@dataclass
class RunConfig:
    n: int = 4
    t: complex = FLAGSHIP.t
    mu: complex = FLAGSHIP.mu
    punctures: list | None = None
    numerator: list | None = None
    chart_p: list | None = None
    chart_q: list | None = None
    tol: float | None = None
    basepoint: complex | None = None
    loops: list | None = None
    grid: tuple | None = None
    report: str | None = None
    seed: int = 0
    random_draws: int = 5
    extra: dict = field(default_factory=dict)
    explicit: set = field(default_factory=set)

    def heun(self) -> HeunParameters:
        if self.n != 4:
            raise ConfigError("this command needs the four-puncture (t, mu) model")
        try:
            return HeunParameters(self.t, self.mu)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def quaddiff(self) -> QuadDiff:
        try:
            if self.punctures is not None:
                base = PuncturedSphere(tuple(self.punctures))
                return QuadDiff(base, tuple(self.numerator or (1.0,)))
            if self.chart_p is not None:
                from .sphere import chart_quaddiff

                return chart_quaddiff(self.chart_p, self.chart_q)
            return heun_Q(self.heun())
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def tolerances(self, points) -> Tolerances:
        kw = {} if self.tol is None else {"abs_tol": self.tol, "rel_tol": self.tol}
        try:
            return Tolerances.for_points(points, **kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = {"n": self.n, "t": self.t, "mu": self.mu, "tol": self.tol, "seed": self.seed}
        if self.punctures is not None:
            d["punctures"] = self.punctures
            d["numerator"] = self.numerator
        if self.chart_p is not None:
            d["chart"] = {"p": self.chart_p, "q": self.chart_q}
        if self.grid is not None:
            d["grid"] = list(self.grid)
        if self.basepoint is not None:
            d["basepoint"] = self.basepoint
        return d


_KNOWN = {"version", "model", "tolerances", "basepoint", "loops", "grid", "report", "seed", "random_draws", "options"}


def load_config(path: str | Path | None = None, **overrides) -> RunConfig:
    """Read a JSON configuration (schema version 1) and apply non-None overrides."""
    cfg = RunConfig()
    base_dir = None
    if path is not None:
        p = Path(path)
        base_dir = p.parent
        try:
            doc = json.loads(p.read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {p} is not valid JSON: {exc}") from exc
        _apply_document(cfg, doc, base_dir)
    for key, value in overrides.items():
        if value is None:
            continue
        cfg.explicit.add(key)
        if key in ("t", "mu"):
            setattr(cfg, key, parse_complex(value))
        elif key == "grid":
            cfg.grid = parse_grid(value)
        elif key == "n":
            cfg.n = int(value)
        elif key == "tol":
            cfg.tol = float(value)
        else:
            setattr(cfg, key, value)
    if cfg.n < 4:
        raise ConfigError("n must be at least 4")
    if cfg.tol is not None and not (0 < cfg.tol < 1e-2):
        raise ConfigError("tol must lie in (0, 1e-2)")
    return cfg


def _apply_document(cfg: RunConfig, doc: Any, base_dir: Path) -> None:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - _KNOWN
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if doc.get("version", 1) != 1:
        raise ConfigError(f"unsupported config version {doc.get('version')}")
    model = doc.get("model", {})
    if not isinstance(model, dict):
        raise ConfigError("'model' must be an object")
    if "t" in model:
        cfg.t = parse_complex(model["t"])
    if "mu" in model:
        cfg.mu = parse_complex(model["mu"])
    if "punctures" in model:
        cfg.punctures = [parse_point(v) for v in model["punctures"]]
        cfg.numerator = [parse_complex(v) for v in model.get("numerator", [1.0])]
        cfg.n = len(cfg.punctures)
        cfg.explicit.add("n")
    if "chart" in model:
        ch = model["chart"]
        cfg.chart_p = [parse_complex(v) for v in ch["p"]]
        cfg.chart_q = [parse_complex(v) for v in ch["q"]]
        if len(cfg.chart_p) != len(cfg.chart_q):
            raise ConfigError("chart p and q must have equal length")
        cfg.n = len(cfg.chart_p) + 3
        cfg.explicit.add("n")
    if "n" in model:
        cfg.n = int(model["n"])
        cfg.explicit.add("n")
    tols = doc.get("tolerances", {})
    if "abs_tol" in tols or "rel_tol" in tols:
        cfg.tol = float(tols.get("abs_tol", tols.get("rel_tol")))
    if "basepoint" in doc:
        cfg.basepoint = parse_complex(doc["basepoint"])
    if "loops" in doc:
        cfg.loops = load_loop_suite(doc["loops"], base_dir)
    if "grid" in doc:
        cfg.grid = parse_grid(doc["grid"])
    if "report" in doc:
        cfg.report = str(doc["report"])
    if "seed" in doc:
        cfg.seed = int(doc["seed"])
    if "random_draws" in doc:
        cfg.random_draws = int(doc["random_draws"])
    cfg.extra = dict(doc.get("options", {}))
