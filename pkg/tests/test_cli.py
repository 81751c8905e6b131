"""Text format, configuration handling and the report driver."""

import json
import random
import subprocess
import sys
from fractions import Fraction as Fr

import pytest

from conftest import AXIOM_MODELS
from logdrw import drw
from logdrw.cli import ParseError, make_config, parse_element, run, serialize
from logdrw.homology import ComplexPresentation, homology
from logdrw.weights import LocalModel, Partition

P2 = LocalModel(2, 1, 1)


def test_unit_and_dlog_text():
    assert serialize(drw.one(P2, 2)) == "1"
    assert serialize(drw.dlog_x(P2, 1, 2)) == "dlog(X1)"
    assert serialize(drw.zero(P2, 2)) == "0"
    assert serialize(drw.dlog_c(LocalModel(2, 1, 0, 1), 1, 2)) == "dlog(C1)"


def test_fractional_term_text():
    model = LocalModel(2, 1, 0)
    x = drw.DrwElement(model, 2, {((Fr(1, 2),), Partition((), ((), (1,))), ()): 2})
    text = "eps{xi=V^1(1); k=[1/p^1]; P=(-inf:[]; I1=[1]); J=[]}"
    assert serialize(x) == text
    assert parse_element(text, model, 2) == x


@pytest.mark.parametrize("model", AXIOM_MODELS, ids=lambda m: m.describe())
def test_round_trip(model):
    rng = random.Random(31)
    for _ in range(250):
        m = rng.randint(1, 3)
        x = drw.random_element(model, m, rng, max_terms=4)
        assert parse_element(serialize(x), model, m) == x


@pytest.mark.parametrize("text", [
    "dlog(X2)", "eps{xi=1; k=[1]; P=(-inf:[]; I0=[1]); J=[1]}", "eps{xi=1; k=[1,2]; P=(-inf:[]); J=[]}",
    "1 + ", "eps{xi=1; k=[1]; P=(I0=[1]); J=[]}", "nonsense",
])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_element(text, P2, 2)


def test_homology_report_text():
    c = ComplexPresentation(2, {0: [2], 1: [2]}, {0: [[2]]})
    assert serialize(homology(c)) == '{"0":["p^1"],"1":["p^1"]}'


def _report(capsys, argv):
    rc = run(argv)
    out = capsys.readouterr().out
    return rc, (json.loads(out) if out else None)


def test_verify_identities_report(capsys):
    rc, rep = _report(capsys, ["verify", "--suite", "identities", "--model", "poly:p=3,n=2,e=1,f=0",
                               "--m", "3", "--trials", "40", "--seed", "42"])
    assert rc == 0
    assert rep["schema"] == "logdrw-report/1"
    assert {c["name"] for c in rep["checks"]} >= {"d^2=0", "Leibniz", "FV=p", "FdV=d"}
    assert all(c["status"] == "pass" for c in rep["checks"])
    assert rep["timing_ms"] == 0


def test_compare_lift_report(capsys):
    rc, rep = _report(capsys, ["compare-lift", "--model", "semistable:p=2,n=2,e=2,f=0,d=2",
                               "--m", "2", "--max-num", "3", "--max-den", "1"])
    assert rc == 0
    assert rep["tables"]["weights"]


def test_gauss_report_flags_the_product_bound(capsys):
    rc, rep = _report(capsys, ["gauss", "--model", "poly:p=3,n=1,e=0,f=0", "--N", "3",
                               "--trials", "60", "--eps", "1/2", "--seed", "1"])
    status = {c["name"]: c["status"] for c in rep["checks"]}
    assert status["gauss-coordinate-identity"] == "pass"
    assert status["gauss-subadditive"] == "pass"
    assert status["gauss-product-bound"] == "fail"
    assert rc == 1
    failure = next(c for c in rep["checks"] if c["name"] == "gauss-product-bound")
    assert failure["details"]["failures"]


@pytest.mark.parametrize("argv", [
    ["verify", "--model", "poly:p=4,n=1"],
    ["verify", "--m", "0"],
    ["gauss", "--eps", "-1"],
    ["frobnicate"],
    ["verify", "--suite", "nope"],
])
def test_bad_input_exit_code(capsys, argv):
    assert run(argv) == 2
    assert "error" in capsys.readouterr().err


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults for a small run\nmodel = poly:p=3,n=1,e=1,f=0\nm = 2\ntrials = 7\n")
    c = make_config(["verify", "--config", str(cfg), "--trials", "9"])
    assert (c.model, c.m, c.trials) == ("poly:p=3,n=1,e=1,f=0", 2, 9)
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    with pytest.raises(ParseError):
        make_config(["verify", "--config", str(bad)])


def test_reports_are_byte_identical(tmp_path):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        argv = ["verify", "--suite", "words", "--model", "poly:p=2,n=2,e=1,f=1", "--m", "2",
                "--trials", "30", "--seed", "5", "--output", str(path)]
        assert run(argv) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "logdrw", "verify", "--suite", "roundtrip",
                           "--trials", "5"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["checks"][0]["status"] == "pass"
