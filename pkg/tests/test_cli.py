import io
import json
import subprocess
import sys

import pytest

from qint.cli import main, run_verify
from qint.soq import build
from qint.tensor import LabeledTensor


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", ["rhat", "g", "pplus", "pminus", "pzero", "d"])
def test_gen_round_trip(name):
    code, out, _ = run("gen", "--n", "3", "--tensor", name)
    assert code == 0
    t = LabeledTensor.from_json(json.loads(out))
    s = build(3)
    want = {"rhat": s.rhat, "g": s.g_lower, "pplus": s.p_plus, "pminus": s.p_minus,
            "pzero": s.p_zero, "d": s.d_matrix}[name]
    assert t == want


def test_gen_all_and_invariants():
    code, out, _ = run("gen", "--n", "3", "--tensor", "all")
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"rhat", "g", "pplus", "pminus", "pzero", "d", "eps", "I2", "I4"}
    assert LabeledTensor.from_json(data["I4"]).rank == 4
    code, out, _ = run("gen", "--n", "4", "--tensor", "I4")
    assert code == 0


def test_gen_usage_errors(monkeypatch):
    assert run("gen", "--n", "2", "--tensor", "g")[0] == 2
    assert run("gen", "--n", "3", "--tensor", "nope")[0] == 2
    assert run("gen", "--n", "3", "--tensor", "I3")[0] == 2
    monkeypatch.setenv("QINT_MAX_DEGREE", "2")
    assert run("gen", "--n", "3", "--tensor", "I4")[0] == 2


def test_verify_is_deterministic():
    a = run("verify", "--n", "3", "--suite", "theorem2", "stokes", "--seed", "4")
    b = run("verify", "--n", "3", "--suite", "theorem2", "stokes", "--seed", "4")
    assert a[0] == 0
    assert a[1] == b[1]


def test_verify_corruption_exit_codes():
    code, out, _ = run("verify", "--n", "3", "--suite", "structure", "--corrupt")
    assert code == 1
    assert json.loads(out)["results"][0]["failed"]
    # a corrupted rewrite rule breaks confluence: internal inconsistency
    code, out, _ = run("verify", "--n", "3", "--suite", "rewrite", "--corrupt")
    assert code == 3


def test_verify_unknown_suite():
    assert run("verify", "--suite", "bogus")[0] == 2


def test_run_verify_api():
    code, report = run_verify([3, 4], ["structure"], seed=1)
    assert code == 0
    assert [r["N"] for r in report["results"]] == [3, 4]


def test_integrate_delta():
    code, out, _ = run("integrate", "--n", "3", "--expr", "g[1,3] t[1] t[3] + g[2,2] t[2] t[2] + g[3,1] t[3] t[1]",
                       "--radial", "delta:r0")
    assert code == 0
    data = json.loads(out)
    # <r-independent f>_x at the lattice point r0: <1>_t r0^(N-1) q^0
    assert data["integral"]["text"] == "r0^2"


def test_integrate_window_and_numeric_base():
    code, out, _ = run("integrate", "--n", "3", "--expr", "1", "--radial", "window:0:2")
    assert code == 0
    code, out, _ = run("integrate", "--n", "3", "--expr", "1", "--radial", "delta:2")
    assert json.loads(out)["integral"]["at_r0"]["text"] == "4"


@pytest.mark.parametrize("argv", [
    ["integrate", "--n", "3", "--expr", "x[7]"],
    ["integrate", "--n", "3", "--expr", "x[1] +"],
    ["integrate", "--n", "3", "--expr", "del[1]"],
    ["integrate", "--n", "3", "--expr", "dx[1]"],
    ["integrate", "--n", "3", "--expr", "1", "--radial", "window:3:1"],
    ["integrate", "--n", "3", "--expr", "1", "--radial", "gauss"],
])
def test_integrate_usage_errors(argv):
    code, _, err = run(*argv)
    assert code == 2
    assert err.startswith("qint: error:")


def test_stokes_commands():
    for variant in ("space", "sphere", "annulus:-2:6"):
        code, out, _ = run("stokes", "--n", "3", "--variant", variant, "--seed", "3", "--samples", "3")
        assert code == 0
        assert json.loads(out)["passed"]
    assert run("stokes", "--n", "3", "--variant", "annulus:1")[0] == 2


def test_limit():
    code, out, _ = run("limit", "--expr", "(q^2 - 1)*(q - 1)^-1", "--at", "1")
    assert code == 0 and json.loads(out)["at"]["value"] == "2"
    code, out, _ = run("limit", "--expr", "q^-1", "--expand", "2")
    assert json.loads(out)["expansion"]["coeffs"] == ["1", "-1", "1"]
    code, out, _ = run("limit", "--expr", "(q - 1)^-1", "--at", "1")
    assert code == 1 and json.loads(out)["at"]["pole"]
    assert run("limit", "--expr", "q", "--at", "1", "--expand", "1")[0] == 2
    assert run("limit", "--expr", "x[1]", "--at", "1")[0] == 2


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qint", "limit", "--expr", "q+1", "--at", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["at"]["value"] == "4"
