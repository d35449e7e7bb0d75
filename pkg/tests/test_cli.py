"""CLI surface tests: schemas, exit codes, determinism."""

import json
import subprocess
import sys

import pytest

CMD = [sys.executable, "-m", "totreal.cli"]


def run(*args):
    proc = subprocess.run(
        CMD + list(args), capture_output=True, text=True, timeout=300
    )
    return proc.returncode, proc.stdout


def test_field_info():
    code, out = run("field", "info", "--D", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == 1
    assert doc["result"]["disc"] == 5
    assert doc["result"]["h"] == 1
    assert doc["result"]["eps"] == ["0", "1"]
    assert doc["elapsed_ms"] is None
    assert set(doc) >= {"command", "inputs", "result", "certificates", "elapsed_ms"}


def test_kloosterman_eval():
    code, out = run("--field", "1", "kloosterman", "eval", "--r1", "1", "--r2", "1", "--c", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["S"][0] == pytest.approx(0.381966, abs=1e-5)
    assert doc["result"]["margin"] == pytest.approx(0.0854, abs=1e-3)


def test_constterm():
    code, out = run("--field", "1", "eisen", "constterm", "--level", "5")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["H_half"] == "1/6"


def test_eisen_count():
    code, out = run("--field", "5", "chars", "eisen-count", "--level", "1", "--X", "14")
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["branches"] == 3


def test_unknown_subcommand_exit_64():
    code, out = run("frobnicate")
    assert code == 64
    assert "error" in json.loads(out)


def test_domain_error_exit_2():
    code, out = run("--field", "1", "kloosterman", "eval", "--r1", "1", "--r2", "1", "--c", "0")
    assert code == 2
    assert "error" in json.loads(out)
    code, out = run("field", "info", "--D", "12")
    assert code == 2


def test_deterministic_output():
    args = ("--field", "5", "spectral", "oldforms", "--level", "4")
    _, out1 = run(*args)
    _, out2 = run(*args)
    assert out1 == out2


def test_sweep_csv():
    code, out = run("--format", "csv", "--field", "1", "kloosterman", "sweep", "--cmax", "20")
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "c_norm,S_re,S_im,margin"
    assert len(lines) > 9 * 10  # 19 moduli x 9 pairs
    for line in lines[1:]:
        assert float(line.split(",")[3]) <= 1 + 1e-9


def test_bessel_cli():
    code, out = run("spectral", "bessel", "--Z", "2", "--t", "-1.5")
    assert code == 0
    doc = json.loads(out)
    assert doc["certificates"]["tail_bound"] < 1e-8
    # --tol tightens the certificate target
    code, out = run("--tol", "1e-10", "spectral", "bessel", "--Z", "2", "--t", "-1.5")
    assert json.loads(out)["certificates"]["tail_bound"] < 1e-10


def test_eisen_subcommands():
    code, out = run("eisen", "dim", "--n", "3", "--m", "1")
    assert code == 0 and json.loads(out)["result"]["dimension"] == 2
    code, out = run("eisen", "norms", "--Np", "5", "--j", "2")
    assert code == 0 and json.loads(out)["result"]["norm_sq"] == "2/3"
    code, out = run("--field", "1", "eisen", "coeff", "--chi-t", "0.7", "--t", "7", "--m", "1")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["t_chi_norm"] == "1"
    code, out = run("--field", "1", "eisen", "localfactor", "--Np", "5", "--s", "1.0",
                    "--case", "level", "--v", "1")
    assert code == 0
    assert json.loads(out)["result"]["value"][0] == pytest.approx(1 / 30)


def test_global_flags_after_subcommand():
    # the spec-style invocation: bare kloosterman with --field trailing
    code, out = run("kloosterman", "--field", "1", "--r1", "1", "--r2", "1", "--c", "5")
    assert code == 0
    assert json.loads(out)["result"]["abs_S"] == pytest.approx(0.381966, abs=1e-5)


def test_chars_list_cli():
    code, out = run("--field", "5", "chars", "list", "--modulus", "2")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["count"] == 3
    assert sorted(c["order"] for c in doc["result"]["characters"]) == [1, 3, 3]
