import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from pulsesync.cli import main


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def rows(text):
    return list(csv.reader(io.StringIO(text)))


# ----------------------------------------------------------------- validate

def test_validate_theta():
    code, text = run("validate", "--prf", "theta", "--eps-list", "0.1,1,5")
    assert code == 0
    assert "all checks pass" in text


def test_validate_constant_fails():
    code, text = run("validate", "--prf", "expr:eps")
    assert code == 1
    assert "failed: Eq2, Eq3, Eq4, Eq5" in text


def test_validate_parse_error(capsys):
    code, _ = run("validate", "--prf", "expr:phi +")
    assert code == 2
    assert "position 5" in capsys.readouterr().err


def test_validate_json():
    code, text = run("validate", "--prf", "example2", "--eps-list", "0.1", "--json")
    data = json.loads(text)
    assert code == 0 and data["ok"] is True
    assert [c["axiom"] for c in data["checks"]] == [
        "Eq1", "Eq2", "Eq3", "Eq4", "Eq5", "Eq6-smoothness"]


def test_unknown_prf(capsys):
    code, _ = run("validate", "--prf", "nope")
    assert code == 2
    assert "unknown PRF" in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    ["classify", "--prf", "theta"],
    ["iterate", "--prf", "theta", "--phi0", "x", "--eps", "1"],
    ["sweep", "--prf", "theta", "--eps-range", "0:1", "--phi0", "0.1"],
    ["reproduce", "--case", "theorem9"],
    ["iterate", "--prf", "theta", "--phi0", "1.5", "--eps", "1"],
    ["iterate", "--prf", "theta", "--phi0", "0.5", "--eps", "-1"],
])
def test_usage_errors(argv, capsys):
    assert run(*argv)[0] == 2


# ----------------------------------------------------------------- classify

def test_classify_theta_json():
    code, text = run("classify", "--prf", "theta", "--eps-list", "0.5", "--json")
    data = json.loads(text)
    assert code == 0
    assert set(data) == {"prf", "tilde_prf", "eps_list", "g", "g_tilde", "lemma3",
                         "disagreements", "notes"}
    assert data["g"][0]["empirical_verdict"] == "neutral"
    assert data["g_tilde"][0]["empirical_verdict"] == "attracting"
    assert len(data["disagreements"]) == 1


def test_classify_example2_text():
    code, text = run("classify", "--prf", "example2", "--eps-list", "0.1")
    assert code == 0
    assert "strongly-attracting-small-eps" in text
    assert "strong=strongly-repelling" in text
    assert "DISAGREEMENT" in text


def test_classify_very_strong_expression():
    code, text = run("classify", "--prf", "expr:-eps*phi*(1-phi)^2", "--eps-list", "0.1",
                     "--json")
    data = json.loads(text)
    assert code == 0
    assert data["lemma3"]["very_strong"] is True
    assert data["g"][0]["derivative_product"] == pytest.approx(0.9)
    assert data["g"][0]["strong_verdict"] == "strongly-attracting"


def test_classify_invalid_expression(capsys):
    code, _ = run("classify", "--prf", "expr:eps", "--eps-list", "0.1")
    assert code == 1
    assert "violates" in capsys.readouterr().err


# ------------------------------------------------------------------ iterate

def test_iterate_theta_rows(capsys):
    code, text = run("iterate", "--prf", "theta", "--phi0", "0.3", "--eps", "1",
                     "--max-iters", "10")
    table = rows(text)
    assert code == 0
    assert table[0] == ["k", "phi"]
    assert len(table) == 12
    assert [int(r[0]) for r in table[1:]] == list(range(11))
    assert all(abs(float(r[1]) - 0.3) <= 1e-12 for r in table[1:])
    assert "verdict: max-iters" in capsys.readouterr().err


def test_iterate_theta_tilde_decreasing():
    code, text = run("iterate", "--prf", "theta-tilde", "--phi0", "0.1", "--eps", "0.5",
                     "--max-iters", "2000")
    phis = np.array([float(r[1]) for r in rows(text)[1:]])
    assert code == 0
    assert np.all(np.diff(phis) < 0)


def test_iterate_json():
    code, text = run("iterate", "--prf", "example2", "--phi0", "0.2", "--eps", "0.1",
                     "--max-iters", "50", "--json")
    data = json.loads(text)
    assert set(data) == {"prf", "eps", "verdict", "iters_used", "limit", "final_phi", "phases"}
    assert len(data["phases"]) == data["iters_used"] + 1


def test_iterate_csv_round_trips_doubles():
    from pulsesync import get_builtin, iterate
    _, text = run("iterate", "--prf", "example1", "--phi0", "0.37", "--eps", "0.3",
                  "--max-iters", "30")
    trace = iterate(get_builtin("example1"), 0.37, 0.3, max_iters=30)
    assert [float(r[1]) for r in rows(text)[1:]] == list(trace.phases)


def test_iterate_range_violation(capsys):
    # valid at eps=0.25 or below only, so eps=1 is rejected before iterating
    code, _ = run("iterate", "--prf", "expr:4*eps*phi*(1-phi)", "--phi0", "0.5", "--eps", "1")
    assert code == 1
    assert "violates" in capsys.readouterr().err


# -------------------------------------------------------------------- sweep

def test_sweep_order_and_columns():
    code, text = run("sweep", "--prf", "theta-tilde",
                     "--eps-range", "0.1:1:10", "--phi0", "0.1", "--max-iters", "500")
    table = rows(text)
    assert code == 0
    assert table[0] == ["eps", "verdict", "iters", "final_phi"]
    assert [float(r[0]) for r in table[1:]] == pytest.approx(np.linspace(0.1, 1, 10))
    finals = [float(r[3]) for r in table[1:]]
    assert all(np.diff(finals) < 0)  # stronger coupling pulls in faster


def test_sweep_json():
    code, text = run("sweep", "--prf", "example2", "--eps-range", "0.01:0.1:3", "--phi0", "0.05",
                     "--max-iters", "100", "--json")
    data = json.loads(text)
    assert code == 0 and len(data) == 3
    assert "phases" not in data[0]


# ----------------------------------------------------------------- simulate

def test_simulate_zero_gaps():
    code, text = run("simulate", "--prf", "zero", "--phiA", "0", "--phiB", "0.7", "--eps", "0",
                     "--cycles", "3")
    table = rows(text)
    assert code == 0
    assert table[0] == ["time", "firer", "phase_other_before", "phase_other_after"]
    assert len(table) == 7
    assert [r[1] for r in table[1:]] == ["B", "A"] * 3
    gaps = np.diff([0.0] + [float(r[0]) for r in table[1:]])
    assert gaps == pytest.approx([0.3, 0.7] * 3)


def test_simulate_json():
    code, text = run("simulate", "--prf", "theta", "--phiA", "0", "--phiB", "0.4", "--eps", "1",
                     "--cycles", "2", "--json")
    data = json.loads(text)
    assert code == 0 and len(data) == 4
    assert set(data[0]) == {"time", "firer", "phase_other_before", "phase_other_after"}


# ---------------------------------------------------------------- reproduce

@pytest.mark.parametrize("case", ["theta-identity", "theorem2-ex1", "theorem2-ex2", "theorem3",
                                  "cubic-expansion"])
def test_reproduce_passing_cases(case):
    code, text = run("reproduce", "--case", case)
    lines = text.strip().splitlines()
    assert code == 0
    assert lines and all(line.startswith("PASS") for line in lines)


def test_reproduce_theta_case_reports_slow_convergence():
    # the classification half passes; 1e6 steps of a cubic-rate map do not
    # bring a step below 1e-12, so the literal convergence checks fail
    code, text = run("reproduce", "--case", "theorem1", "--json")
    data = json.loads(text)
    checks = {c["name"]: c for c in data["cases"]["theorem1"]}
    assert code == 1 and data["ok"] is False
    assert checks["theta empirical neutral at eps=0.5"]["passed"]
    assert checks["theta-tilde empirical attracting at eps=0.5"]["passed"]
    assert checks["disagreement flagged at every eps"]["passed"]
    failing = [c for c in checks.values() if not c["passed"]]
    assert failing and all("max-iters" in c["detail"] for c in failing)


# ------------------------------------------------------------ determinism

CLI_RUNS = [
    ["iterate", "--prf", "theta-tilde", "--phi0", "0.2", "--eps", "0.7", "--max-iters", "200"],
    ["sweep", "--prf", "example1", "--eps-range", "0.05:0.5:8", "--phi0", "0.3",
     "--max-iters", "300"],
    ["simulate", "--prf", "example2", "--phiA", "0.1", "--phiB", "0.6", "--eps", "0.1",
     "--cycles", "20"],
    ["classify", "--prf", "example1", "--eps-list", "0.5,0.1", "--max-iters", "2000", "--json"],
]


@pytest.mark.parametrize("argv", CLI_RUNS)
def test_byte_identical_outputs(argv):
    cmd = [sys.executable, "-m", "pulsesync", *argv]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a


@pytest.mark.parametrize("argv", [r for r in CLI_RUNS if r[0] != "classify"])
def test_json_round_trip(argv):
    code, text = run(*argv, "--json")
    data = json.loads(text)
    assert code == 0
    assert json.loads(json.dumps(data)) == data


def test_version():
    out = subprocess.run([sys.executable, "-m", "pulsesync", "--version"], capture_output=True,
                         text=True, check=True).stdout
    assert out.startswith("pulsesync ")
