import json
import math

import pytest

import main
from cli.models import CheckRecord

GRID = ["--x0", "0.2", "--x1", "0.2", "--nx", "1", "--y0", "0.1", "--y1", "0.1", "--ny", "1"]


def run(capsys, *argv):
    code = main.main(list(argv))
    return code, capsys.readouterr().out


def test_eval_f2(capsys):
    code, out = run(capsys, "eval", "F2", "a=1", "b1=1", "b2=1", "c1=1", "c2=1", "x=0.2", "y=0.3")
    assert code == 0
    record = json.loads(out)
    assert record["kind"] == "F2"
    assert record["value"] == pytest.approx(2.0, rel=1e-9)
    assert record["converged"] is True
    assert record["params"] == {"a": 1.0, "b1": 1.0, "b2": 1.0, "c1": 1.0, "c2": 1.0}


def test_eval_outside_region(capsys):
    code, out = run(capsys, "eval", "H2", "a=0.7", "b1=0.4", "b2=0.5", "c1=0.6", "c2=1.3",
                    "x=0.5", "y=-3")
    assert code == 2
    assert out == ""


@pytest.mark.parametrize("argv", [
    ["eval", "F2", "a=1", "b1=1", "b2=1", "c1=1", "c2=1", "x=0.2"],
    ["eval", "F2", "a=1", "b1=1", "b2=1", "c1=1", "c2=1", "x=abc", "y=0.1"],
    ["eval", "F2", "a=1", "b1=1", "b2=1", "c1=1", "c2=1", "x=0.2", "y=0.1", "z=1"],
    ["eval", "F9", "x=0.2", "y=0.1"],
    ["eval", "F2", "x=0.2", "y=0.1", "--format", "xml"],
])
def test_usage_errors(capsys, argv):
    assert main.main(argv) == 1


def test_kernel_region_one(capsys):
    code, out = run(capsys, "kernel", "a=1", "b=1", "c=1", "d=1", "e=0", "s=0.3", "t=0.4")
    assert code == 0
    record = json.loads(out)
    assert record["region"] == "I"
    assert record["value"] == pytest.approx(0.12, rel=1e-12)
    assert "oracle_value" not in record


def test_kernel_outside(capsys):
    code, out = run(capsys, "kernel", "a=1", "b=1", "c=1", "d=1", "e=0", "s=-1", "t=0.4")
    assert code == 0
    record = json.loads(out)
    assert record["region"] == "OUTSIDE"
    assert record["value"] == 0.0


def test_kernel_with_oracle(capsys):
    code, out = run(capsys, "kernel", "--oracle", "a=1", "b=1", "c=1", "d=1", "e=0", "s=1.5", "t=2")
    assert code == 0
    record = json.loads(out)
    assert record["region"] == "II"
    assert record["oracle_value"] == pytest.approx(0.5, rel=1e-9)
    assert record["abs_diff"] < 1e-9


def test_kernel_strict_failure(capsys):
    code, _ = run(capsys, "kernel", "--strict", "a=1", "b=1", "c=-0.5", "d=1", "e=0", "s=0.3", "t=0.4")
    assert code == 3


def test_kernel_styles_do_not_mix(capsys):
    code, _ = run(capsys, "kernel", "a=1", "b=1", "c=1", "d=1", "e=0", "mu=0.3", "s=0.3", "t=0.4")
    assert code == 1


def test_kernel_from_derivative_parameters(capsys):
    code, out = run(capsys, "kernel", "--from-deriv", "alpha=0.2", "beta=0.3", "gamma=0.1",
                    "k=1", "n=2", "mu=0.4", "nu=0.3", "s=0.3", "t=0.4")
    assert code == 0
    record = json.loads(out)
    assert record["region"] == "I"
    assert set(record["params"]) == {"alpha", "beta", "gamma", "k", "n", "mu", "nu"}


def test_deriv_square_bilinear(capsys):
    code, out = run(capsys, "deriv", "--domain", "square", "--f", "3*x*y + x", *GRID,
                    "--delta", "0.1", "--m", "1", "--l", "1")
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "deriv"
    assert report["function"] == "3*x*y + x"
    [row] = report["rows"]
    assert row["value"] == pytest.approx(3.0, rel=1e-10)
    assert "reference" not in row


def test_deriv_triangle(capsys):
    code, out = run(capsys, "deriv", "--domain", "triangle", "--f", "x*y", *GRID,
                    "--delta", "0.1", "--k", "1", "--n", "2")
    assert code == 0
    [row] = json.loads(out)["rows"]
    assert row["value"] == pytest.approx(1.0, rel=1e-9)


def test_deriv_polynomial_reference(capsys):
    code, out = run(capsys, "deriv", "--domain", "square", "--f", "polynomial",
                    "--x0", "1", "--x1", "1", "--nx", "1", "--y0", "2", "--y1", "2", "--ny", "1",
                    "--delta", "0.001", "--m", "1", "--l", "1")
    assert code == 0
    [row] = json.loads(out)["rows"]
    # d^2/dxdy of x^3 y^2 - 2 x^2 y + 3 x y - y + 1 is 6 x^2 y - 4 x + 3
    assert row["reference"] == pytest.approx(11.0)
    assert row["abs_err"] < 1e-4


@pytest.mark.parametrize("extra", [
    ["--domain", "triangle", "--k", "1", "--n", "2", "--m", "1"],
    ["--domain", "square", "--m", "1"],
    ["--domain", "square", "--m", "1", "--l", "1", "--nx", "0"],
])
def test_deriv_argument_errors(capsys, extra):
    argv = ["deriv", "--f", "x*y", *GRID, "--delta", "0.1", *extra]
    assert main.main(argv) == 1


def test_deriv_csv(capsys):
    code, out = run(capsys, "deriv", "--domain", "square", "--f", "x*y",
                    "--x0", "0", "--x1", "1", "--nx", "2", "--y0", "0", "--y1", "0", "--ny", "1",
                    "--delta", "0.1", "--m", "1", "--l", "1", "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "x,y,value"
    assert len(lines) == 3
    assert lines[2].startswith("1.0,0.0,")


def test_output_file(capsys, tmp_path):
    target = tmp_path / "kernel.json"
    code, out = run(capsys, "kernel", "a=1", "b=1", "c=1", "d=1", "e=0", "s=0.3", "t=0.4",
                    "--output", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text(encoding="utf-8"))["region"] == "I"


def test_config_file_with_flag_override(capsys, tmp_path):
    config = tmp_path / "deriv.conf"
    config.write_text("# bilinear check\ndomain=square\nf=3*x*y + x\nx0=0.2\nx1=0.2\nnx=1\n"
                      "y0=0.1\ny1=0.1\nny=1\ndelta=0.5\nm=1\nl=1\nformat=csv\n", encoding="utf-8")
    code, out = run(capsys, "deriv", "--config", str(config), "--format", "json")
    assert code == 0
    [row] = json.loads(out)["rows"]
    assert row["value"] == pytest.approx(3.0, rel=1e-10)


def test_missing_config_file(capsys, tmp_path):
    assert main.main(["deriv", "--config", str(tmp_path / "absent.conf")]) == 1


def test_fracderiv_growth_gives_nan_rows(capsys):
    code, out = run(capsys, "fracderiv", "--domain", "square", "--f", "exp",
                    "--x0", "0", "--x1", "0", "--nx", "1", "--y0", "0", "--y1", "0", "--ny", "1",
                    "--delta", "0.1", "--m", "2", "--l", "1", "--mu", "0.5", "--nu", "0.5")
    assert code == 0
    [row] = json.loads(out)["rows"]
    assert row["value"] is None


def test_fracderiv_exp_decay_reference(capsys):
    code, out = run(capsys, "fracderiv", "--domain", "square", "--f", "exp-decay",
                    "--x0", "0.3", "--x1", "0.3", "--nx", "1", "--y0", "0.2", "--y1", "0.2", "--ny", "1",
                    "--delta", "0.05", "--m", "2", "--l", "1", "--mu", "0.5", "--nu", "0.5")
    assert code == 0
    [row] = json.loads(out)["rows"]
    assert row["reference"] == pytest.approx(math.exp(-0.5))
    assert row["abs_err"] <= 1e-2 * math.exp(-0.5)


def test_verify_biortho(capsys):
    code, out = run(capsys, "verify", "--suite", "biortho")
    assert code == 0
    report = json.loads(out)
    assert report["pass"] is True
    assert report["failed"] == 0
    assert len(report["checks"]) == 6


def test_verify_failure_exit_code(capsys, monkeypatch):
    failing = [CheckRecord(name="forced", measured=1.0, tolerance=0.5, passed=False)]
    monkeypatch.setattr("cli.handlers.run_suite", lambda *args: failing)
    code, out = run(capsys, "verify", "--suite", "pde")
    assert code == 4
    assert json.loads(out)["pass"] is False


def test_kernel_region_three_next_to_t_one(capsys):
    code, out = run(capsys, "kernel", "a=2", "b=2", "c=-0.5", "d=-0.5", "e=-2", "s=0.7727", "t=1.0002")
    assert code == 0
    record = json.loads(out)
    assert record["region"] == "III"
    assert math.isfinite(record["value"])


@pytest.mark.parametrize("error", [OverflowError, FloatingPointError, ZeroDivisionError])
def test_numeric_failures_map_to_exit_two(capsys, monkeypatch, error):
    def failing(*args, **kwargs):
        raise error("forced")
    monkeypatch.setattr("cli.handlers.evaluate", failing)
    code, out = run(capsys, "eval", "F2", "a=1", "b1=1", "b2=1", "c1=1", "c2=1", "x=0.2", "y=0.3")
    assert code == 2
    assert out == ""


def test_fracderiv_triangle_kernel_method(capsys):
    code, out = run(capsys, "fracderiv", "--domain", "triangle", "--f", "exp-decay", "--method", "kernel",
                    "--x0", "0.3", "--x1", "0.3", "--nx", "1", "--y0", "0.2", "--y1", "0.2", "--ny", "1",
                    "--delta", "0.5", "--k", "1", "--n", "2", "--mu", "0.5", "--nu", "0.5", "--n-nodes", "8")
    assert code == 0
    [row] = json.loads(out)["rows"]
    assert math.isfinite(row["value"])


def test_verify_default_samples(capsys, monkeypatch):
    seen = []

    def record(suite, samples, seed, tol):
        seen.append(samples)
        return [CheckRecord(name="forced", measured=0.0, tolerance=1.0, passed=True)]
    monkeypatch.setattr("cli.handlers.run_suite", record)
    code, _ = run(capsys, "verify", "--suite", "kernels")
    assert code == 0
    assert seen == [20]
