"""CLI behavior: outputs, determinism, error handling."""

import json
import subprocess
import sys

import pytest


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "azdimer.cli", *args],
        capture_output=True,
        text=True,
        timeout=600,
    )
    return proc.returncode, proc.stdout


def test_build_pentagon(tmp_path):
    code, out = run_cli(
        "build", "--preset", "pentagon",
        "--c", "e1=-0.5,e2=-0.5,e3=0.5,e4=-0.5,e5=0.5",
        "--out", str(tmp_path / "graph.json"),
        "--svg", str(tmp_path / "graph.svg"),
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["admissible"] is True
    assert doc["whites"] == 7 and doc["blacks"] == 7
    assert (tmp_path / "graph.json").exists()
    assert (tmp_path / "graph.svg").exists()


def test_build_nonadmissible_exit_zero():
    code, out = run_cli(
        "build", "--preset", "square1x1",
        "--c", "e1=-0.5,e2=1.5,e3=-0.5,e4=1.5",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["admissible"] is False


def test_malformed_input_exit_one(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, out = run_cli("build", "--graph", str(bad))
    assert code == 1
    doc = json.loads(out)
    assert "error" in doc


def test_verify_pentagon():
    code, out = run_cli("verify", "--preset", "pentagon", "--angles", "even")
    assert code == 0
    doc = json.loads(out)
    assert doc["kk_inv_defect"] < 1e-10


def test_invert_methods_agree(tmp_path):
    outs = {}
    for method in ("residues", "lu"):
        code, out = run_cli(
            "invert", "--preset", "pentagon", "--angles", "even",
            "--method", method,
            "--out", str(tmp_path / f"{method}.json"),
        )
        assert code == 0
        outs[method] = json.loads((tmp_path / f"{method}.json").read_text())
    a = outs["residues"]["entries"]
    b = outs["lu"]["entries"]
    for ra, rb in zip(a, b):
        for za, zb in zip(ra, rb):
            assert abs(float(za["re"]) - float(zb["re"])) < 1e-9
            assert abs(float(za["im"]) - float(zb["im"])) < 1e-9


def test_arctic_deterministic(tmp_path):
    for name in ("a", "b"):
        code, out = run_cli(
            "arctic", "--samples", "120",
            "--csv", str(tmp_path / f"{name}.csv"),
            "--svg", str(tmp_path / f"{name}.svg"),
        )
        assert code == 0
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_tropical_summary(tmp_path):
    code, out = run_cli("tropical", "--out", str(tmp_path / "curve.json"))
    assert code == 0
    doc = json.loads(out)
    assert doc["balanced"] is True
    assert doc["harmonic_residuals"] == ["0", "0"]
    assert sorted(doc["interior_values"]) == ["1/2", "1/6", "3/14", "5/42"]


def test_shuffle_deterministic(tmp_path):
    outs = []
    for _ in range(2):
        code, out = run_cli("shuffle", "--n", "8", "--seed", "13")
        assert code == 0
        outs.append(json.loads(out))
    assert outs[0] == outs[1]
    assert outs[0]["dominoes"] == 72


def test_probs_pentagon():
    code, out = run_cli("probs", "--preset", "pentagon", "--angles", "even",
                        "--edges", "0,1,2")
    assert code == 0
    doc = json.loads(out)
    assert doc["max_marginal_defect"] < 1e-9
