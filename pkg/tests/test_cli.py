import io
import json
import subprocess
import sys

import pytest

from dunkl_a2 import cli


def run(*argv):
    out = io.StringIO()
    code = cli.main(list(argv), out)
    return code, out.getvalue()


def test_eval_kernel_csv():
    code, text = run("eval", "--k", "1", "--lambda", "1,0,-1", "--mu", "0.3,0.1,-0.4")
    assert code == 0
    header, row = text.strip().splitlines()
    rec = dict(zip(header.split(","), row.split(",")))
    assert float(rec["E"]) == pytest.approx(1.2246759785197237, rel=1e-13)
    assert float(rec["J"]) == pytest.approx(1.0329255372769197, rel=1e-13)
    assert float(rec["error_estimate"]) < 1e-10


def test_eval_density_json():
    code, text = run("eval", "--k", "1", "--lambda", "1,0,-1", "--x", "0.2", "--y", "0.1", "--format", "json")
    assert code == 0
    assert json.loads(text)["F"] == pytest.approx(2.5272, rel=1e-13)


def test_output_is_byte_stable():
    args = ("eval", "--k", "3/4", "--lambda", "1.5,0.2,-1.7", "--mu", "0.1,0.2,-0.3")
    assert run(*args) == run(*args)


def test_rational_k():
    a = run("eval", "--k", "1/2", "--lambda", "1,0,-1", "--mu", "0.3,0.1,-0.4")[1]
    b = run("eval", "--k", "0.5", "--lambda", "1,0,-1", "--mu", "0.3,0.1,-0.4")[1]
    assert a.splitlines()[1].split(",")[2:] == b.splitlines()[1].split(",")[2:]


@pytest.mark.parametrize("argv,msg", [
    (("eval", "--k", "0", "--lambda", "1,0,-1", "--mu", "0,0,0"), "k must be positive"),
    (("eval", "--k", "1/", "--lambda", "1,0,-1", "--mu", "0,0,0"), "malformed rational"),
    (("eval", "--k", "1", "--lambda", "0,1,-1", "--mu", "0,0,0"), "lambda3 < lambda2 < lambda1"),
    (("eval", "--k", "1", "--lambda", "1,0", "--mu", "0,0,0"), "three"),
    (("eval", "--k", "1", "--mu", "0,0,0"), "--lambda is required"),
    (("eval", "--k", "1", "--lambda", "1,0,-1", "--x", "0.1"), "together"),
    (("eval", "--k", "1", "--lambda", "1,0,-1", "--quad-order", "2", "--mu", "0,0,0"), "quad-order"),
])
def test_config_errors(argv, msg, capsys):
    code, _ = run(*argv)
    assert code == 2
    assert msg in capsys.readouterr().err


def test_usage_error_exit_code(capsys):
    assert run("frobnicate")[0] == 2
    assert run()[0] == 2


def test_large_argument_warning(capsys):
    code, _ = run("eval", "--k", "1", "--lambda", "3,-1,-2", "--mu", "20,0,-20")
    assert code == 0
    assert "warning" in capsys.readouterr().err


def test_grid_density(monkeypatch):
    monkeypatch.setenv("DUNKL_A2_THREADS", "2")
    code, text = run("grid", "--k", "1", "--lambda", "1,0,-1", "--x", "0.1:0.3:3", "--y", "0:0.1:2")
    assert code == 0
    lines = text.strip().splitlines()
    assert lines[0] == "x,y,F" and len(lines) == 7
    assert all(float(l.split(",")[2]) > 0 for l in lines[1:])


def test_grid_kernel_json():
    code, text = run("grid", "--kind", "E", "--k", "1", "--lambda", "1,0,-1",
                     "--mu1", "0:0.3:2", "--mu2", "0.1", "--mu3", "-0.4", "--format", "json")
    assert code == 0
    recs = json.loads(text)
    assert len(recs) == 2
    assert recs[1]["E"] == pytest.approx(1.2246759785197237, rel=1e-13)


def test_grid_bad_range(capsys):
    assert run("grid", "--k", "1", "--lambda", "1,0,-1", "--x", "0:1:zero")[0] == 2


def test_verify_passes():
    code, text = run("verify", "--suite", "bessel")
    assert code == 0
    assert all(line.endswith(",pass") for line in text.strip().splitlines()[1:])


def test_verify_failure_exit_code(capsys):
    code, text = run("verify", "--suite", "eigen", "--k", "1", "--lambda", "1,0,-1", "--tol", "1e-30")
    assert code == 1
    assert "FAIL" in text
    assert "failed: eigen" in capsys.readouterr().err


def test_verify_opdam_json():
    code, text = run("verify", "--suite", "opdam", "--k", "1/2", "--format", "json")
    assert code == 0
    assert {c["name"] for c in json.loads(text)} >= {"opdam.k=1/2"}


def test_oracle():
    code, text = run("oracle", "--k", "1", "--lambda", "1,0,-1", "--mu", "0.4,0.1,-0.5",
                     "--series-degree", "14", "--format", "json")
    assert code == 0
    rec = json.loads(text)
    assert rec["E"] == pytest.approx(1.3093717226581134, rel=1e-14)
    assert rec["E_tail_bound"] < 1e-8


def test_oracle_component():
    code, text = run("oracle", "--k", "1", "--lambda", "1,0,-1", "--mu", "0.4,0.1,-0.5", "--component", "1")
    assert code == 0
    assert float(text.splitlines()[1].split(",")[2]) == pytest.approx(0.225, abs=1e-15)


def test_oracle_tail_warning(capsys):
    code, _ = run("oracle", "--k", "1", "--lambda", "2,0,-2", "--mu", "2,0,-2", "--series-degree", "4")
    assert code == 0
    assert "tail bound" in capsys.readouterr().err


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "dunkl_a2", "eval", "--k", "1", "--lambda", "1,0,-1",
                           "--mu", "0,0,0"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert float(proc.stdout.splitlines()[1].split(",")[6]) == pytest.approx(1.0, abs=1e-12)


def test_eval_normalization_exact():
    code, text = run("eval", "--k", "1", "--lambda", "1,0,-1", "--mu", "0,0,0", "--format", "json")
    rec = json.loads(text)
    assert code == 0 and abs(rec["E"] - 1) <= 1e-12 and abs(rec["J"] - 1) <= 1e-12


def test_eval_matches_oracle_subcommand():
    args = ("--k", "1", "--lambda", "1,0,-1", "--mu", "0.3,0.1,-0.4", "--format", "json")
    e = json.loads(run("eval", *args)[1])
    o = json.loads(run("oracle", *args, "--series-degree", "14")[1])
    assert abs(e["E"] - o["E"]) <= 1e-6 and abs(e["J"] - o["J"]) <= 1e-6


def test_oracle_at_origin_is_one():
    code, text = run("oracle", "--k", "1/2", "--mu", "0,0,0", "--lambda", "1,0,-1", "--format", "json")
    assert code == 0 and json.loads(text)["E"] == 1.0


def test_grid_outside_support_is_zero():
    code, text = run("grid", "--k", "1", "--lambda", "1,0,-1", "--x", "2:3:3", "--y", "0:1:3")
    lines = text.splitlines()
    assert code == 0 and lines[0] == "x,y,F" and len(lines) == 10
    assert all(float(l.split(",")[2]) == 0.0 for l in lines[1:])


def test_grid_row_order_is_lexicographic(monkeypatch):
    monkeypatch.setenv("DUNKL_A2_THREADS", "4")
    text = run("grid", "--k", "1", "--lambda", "1,0,-1", "--x", "0:0.2:3", "--y", "-0.1:0.1:3")[1]
    pts = [tuple(map(float, l.split(",")[:2])) for l in text.splitlines()[1:]]
    assert pts == sorted(pts)


def test_grid_trapezoid_reproduces_kernel():
    np = pytest.importorskip("numpy")
    nx, ny = 61, 121
    text = run("grid", "--k", "1", "--lambda", "1,0,-1", "--x", f"-0.5:0.5:{nx}", "--y", f"-1:1:{ny}")[1]
    rows = np.array([[float(v) for v in l.split(",")] for l in text.splitlines()[1:]])
    xs, ys = rows[::ny, 0], rows[:ny, 1]
    F = rows[:, 2].reshape(nx, ny)
    mu = (0.3, 0.1, -0.4)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    # <mu, nu> with nu = (x + y, x - y, -2x)
    expo = (mu[0] + mu[1] - 2 * mu[2]) * X + (mu[0] - mu[1]) * Y
    got = np.trapezoid(np.trapezoid(F * np.exp(expo), ys, axis=1), xs)
    assert got == pytest.approx(1.2246759785197237, abs=1e-3)


def test_negative_leading_values():
    code, text = run("eval", "--k", "1", "--lambda", "1,0,-1", "--mu", "-0.4,0.1,0.3")
    assert code == 0
    code, _ = run("eval", "--k", "-1", "--lambda", "1,0,-1", "--mu", "0,0,0")
    assert code == 2
