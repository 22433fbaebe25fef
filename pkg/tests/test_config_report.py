import json
import math

import numpy as np
import pytest

from qdlab.config import (
    SAFE_MU,
    ConfigError,
    grid_parameters,
    load_config,
    load_loop_suite,
    parse_complex,
    parse_grid,
    parse_point,
    random_parameters,
)
from qdlab.report import Check, Report, check_close, encode
from qdlab.sphere import INF


@pytest.mark.parametrize("value, expected", [
    ([0.31, 0.27], 0.31 + 0.27j),
    ("0.31+0.27i", 0.31 + 0.27j),
    ("-1.5i", -1.5j),
    (2, 2 + 0j),
])
def test_parse_complex(value, expected):
    assert parse_complex(value) == expected


@pytest.mark.parametrize("value", ["abc", [1, 2, 3], True, None])
def test_parse_complex_rejects(value):
    with pytest.raises(ConfigError):
        parse_complex(value)


def test_parse_point_inf():
    assert parse_point("inf") is INF


def test_parse_grid():
    assert parse_grid("5x3") == (5, 3)
    assert parse_grid([2, 4]) == (2, 4)
    for bad in ("5y", "0x2", 7):
        with pytest.raises(ConfigError):
            parse_grid(bad)


def test_grid_stays_in_safe_region():
    pts = grid_parameters(5, 5)
    assert len(pts) == 25
    for p in pts:
        assert abs(abs(p.t - 0.5) - 0.35) < 1e-14
        assert SAFE_MU[0] - 1e-12 <= abs(p.mu) <= SAFE_MU[1] + 1e-12


def test_random_parameters_are_seeded():
    a, b = random_parameters(3, 7), random_parameters(3, 7)
    assert a == b
    assert random_parameters(3, 8) != a


def test_loop_suite():
    doc = [[
        {"kind": "line", "start": [0.5, 0.5], "end": [0.5, -0.5]},
        {"kind": "arc", "start": [0.5, -0.5], "end": [0.5, 0.5], "center": [0, 0], "sweep": -1.5 * math.pi},
    ]]
    (loop,) = load_loop_suite(doc)
    assert loop.closed and loop.winding_number(0j) == -1
    with pytest.raises(ConfigError):
        load_loop_suite([[{"kind": "spiral", "start": 0, "end": 1}]])


def test_load_config_document_and_overrides(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"version": 1, "model": {"t": [0.4, 0.3], "mu": "1+0.1i"},
                                "tolerances": {"abs_tol": 1e-10}, "seed": 3}))
    cfg = load_config(path, mu="2")
    assert cfg.t == 0.4 + 0.3j and cfg.mu == 2 and cfg.tol == 1e-10 and cfg.seed == 3
    assert "mu" in cfg.explicit


@pytest.mark.parametrize("doc", [{"version": 2}, {"bogus": 1}, [1, 2], {"model": 3}])
def test_load_config_rejects(tmp_path, doc):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ConfigError):
        load_config(path)


def test_load_config_rejects_bad_tol_and_n():
    with pytest.raises(ConfigError):
        load_config(tol=0.5)
    with pytest.raises(ConfigError):
        load_config(n=3)


def test_encode():
    out = encode({"z": 1 + 2j, "p": INF, "x": float("inf"), "a": np.array([1j]), "b": np.bool_(True)})
    assert out == {"z": [1.0, 2.0], "p": "inf", "x": "inf", "a": [[0.0, 1.0]], "b": True}


def test_report_schema(tmp_path):
    rep = Report("monodromy", parameters={"t": 0.5j})
    rep.add(check_close("c", 1.0, 1.0 + 1e-9, 1e-6))
    rep.add(Check("d", 1, 2, 1.0, 0.1, False))
    d = json.loads(rep.write(tmp_path / "r.json"))
    assert d["version"] == 1 and d["pass"] is False
    assert set(d) == {"version", "command", "parameters", "conventions", "checks", "results", "pass", "timings"}
    assert d["parameters"]["t"] == [0.0, 0.5]
    assert json.loads((tmp_path / "r.json").read_text()) == d
