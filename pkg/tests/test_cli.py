import json
import math
import subprocess
import sys

import pytest

from beamsym.beam import read_beam_file
from beamsym.cli import run
from beamsym.equivalence import build_transform
from beamsym.symmetry import classify
from golden_cases import CASES, DATA, GOLDEN, invoke


def _close(a, b, path="$"):
    if isinstance(a, dict):
        assert isinstance(b, dict) and a.keys() == b.keys(), path
        for k in a:
            _close(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, list):
        assert isinstance(b, list) and len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            _close(x, y, f"{path}[{i}]")
    elif isinstance(a, float) and isinstance(b, (int, float)) and not isinstance(b, bool):
        # roundoff-level values may differ across BLAS builds
        assert math.isclose(a, b, rel_tol=1e-7, abs_tol=1e-12), path
    else:
        assert a == b, path


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    code, text = invoke(CASES[name])
    assert code == 0
    want = json.loads((GOLDEN / f"{name}.json").read_text(encoding="utf-8"))
    _close(json.loads(text), want)


def test_structured_reports_carry_schema():
    for name, argv in CASES.items():
        doc = json.loads((GOLDEN / f"{name}.json").read_text(encoding="utf-8"))
        assert doc["schema"] == f"beamsym.{argv[0]}/1"


def test_human_format_is_derived():
    code, text = invoke(CASES["classify_uniform"], fmt="human")
    assert code == 0
    assert "label: A3,3⊕A1" in text


def test_labels_in_golden_reports():
    load = lambda n: json.loads((GOLDEN / f"{n}.json").read_text(encoding="utf-8"))
    assert load("classify_uniform")["label"] == "A3,3⊕A1"
    assert load("classify_linear")["label"] == "A1⊕A2"
    assert load("canonicalize_inverse_square")["pullback"]["verified"] is True


@pytest.mark.parametrize("argv", [
    ["classify"],
    ["classify", "--beam", "x.beam", "--bogus"],
    ["frobnicate"],
    ["spectrum", "--beam", "x.beam", "--N", "-3"],
    ["gottlieb", "--exponent", "3/2"],
])
def test_usage_errors(argv, capsys):
    code = run(argv)
    assert code == 2


def test_unknown_flag_lists_valid_flags(capsys):
    assert run(["spectrum", "--beam", str(DATA / "uniform.beam"), "--frequency", "3"]) == 2
    err = capsys.readouterr().err
    assert "--frequency" in err and "--n-modes" in err and "--beam" in err


def test_missing_file(capsys):
    assert run(["classify", "--beam", "missing.beam"]) == 1
    assert "file not found: missing.beam" in capsys.readouterr().err


def test_domain_errors_exit_one(tmp_path, capsys):
    assert run(["canonicalize", "--beam", str(DATA / "exponential.beam")]) == 0
    assert run(["canonicalize", "--f", "exp(x)", "--m", "1+x", "--interval", "0", "1"]) == 1
    assert run(["isospectral-check", "--beam", str(DATA / "linear.beam"), "--N", "256"]) == 1
    assert run(["reduce", "--f", "(1+x)^2", "--interval", "0", "1"]) == 1
    assert run(["spectrum", "--beam", str(DATA / "uniform.beam"), "--N", "100"]) == 1
    bad = tmp_path / "neg.beam"
    bad.write_text('{"name": "n", "f": "x", "m": "1", "domain": [-1, 1]}')
    assert run(["classify", "--beam", str(bad)]) == 1
    assert run(["gottlieb", "--exponent", "1", "--A", "1", "--B", "1", "--K", "1",
                "--mobius", "0,1,1,0", "--interval", "0", "1"]) == 1


def test_gottlieb_then_classify(tmp_path, capsys):
    out = tmp_path / "beam.beam"
    assert run(["gottlieb", "--exponent", "3/2", "--A", "1", "--B", "1", "--K", "1",
                "--mobius", "0,1,1,0", "--interval", "0", "1", "--out", str(out)]) == 0
    capsys.readouterr()
    assert run(["classify", "--beam", str(out), "--format", "structured"]) == 0
    assert json.loads(capsys.readouterr().out)["label"] == "A3,3⊕A1"


def test_report_out_file(tmp_path):
    out = tmp_path / "r.json"
    assert run(["classify", "--beam", str(DATA / "uniform.beam"), "--format", "structured",
                "--out", str(out)]) == 0
    assert json.loads(out.read_text())["label"] == "A3,3⊕A1"


def test_canonicalize_and_isospectral_share_the_map(capsys):
    beam = str(DATA / "uniform.beam")
    run(["canonicalize", "--beam", beam, "--format", "structured"])
    canon = json.loads(capsys.readouterr().out)
    run(["isospectral-check", "--beam", beam, "--N", "256", "--format", "structured"])
    iso = json.loads(capsys.readouterr().out)
    assert canon["constants"] == iso["constants"]
    p = read_beam_file(beam)
    tr = build_transform(p, classify(p))
    assert list(canon["constants"].values()) == list(tr.constants)


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "beamsym", "--version"], capture_output=True,
                         text=True, check=False)
    assert res.returncode == 0 and res.stdout.startswith("beamsym ")
