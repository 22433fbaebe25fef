import json

import pytest

from qdlab.cli import build_parser, main


def test_parser_lists_subcommands():
    text = build_parser().format_help()
    for cmd in ("monodromy", "periods", "verify-goldman", "symplectic-check", "variational-check"):
        assert cmd in text


def test_monodromy_passes(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["monodromy", "--report", str(out)]) == 0
    d = json.loads(out.read_text())
    assert d["command"] == "monodromy" and d["pass"] is True
    assert json.loads(capsys.readouterr().out) == d


def test_zero_mu_passes(tmp_path):
    assert main(["monodromy", "--mu", "0", "-q"]) == 0


def test_numerical_failure_exits_one(tmp_path):
    out = tmp_path / "r.json"
    assert main(["monodromy", "--mu", "6", "-q", "--report", str(out)]) == 1
    assert json.loads(out.read_text())["pass"] is False


@pytest.mark.parametrize("argv", [
    ["monodromy", "--t", "1.0000001"],
    ["monodromy", "--grid", "5y"],
    ["monodromy", "--t", "nonsense"],
    ["monodromy", "--config", "/nonexistent.json"],
    ["monodromy", "--tol", "0.5"],
    ["nonexistent-command"],
    [],
])
def test_input_errors_exit_two(argv):
    assert main(argv) == 2


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"version": 1, "model": {"t": "0.5+0.35i", "mu": 1}, "report": str(tmp_path / "o.json")}))
    assert main(["monodromy", "--config", str(cfg), "-q"]) == 0
    assert json.loads((tmp_path / "o.json").read_text())["parameters"]["t"] == [0.5, 0.35]


def test_config_loop_suite(tmp_path):
    loop = [{"kind": "arc", "start": [0.1, 0], "end": [0.1, 0], "center": [0, 0], "sweep": 6.283185307179586}]
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"version": 1, "loops": [loop], "report": str(tmp_path / "o.json")}))
    assert main(["monodromy", "--config", str(cfg), "-q"]) == 0
    names = [c["name"] for c in json.loads((tmp_path / "o.json").read_text())["checks"]]
    assert any("loop" in n for n in names)
