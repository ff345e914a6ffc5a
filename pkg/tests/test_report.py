import json

import pytest

from cli.models import CheckRecord, GridReport, GridRow, KernelRecord, OutputFormat, VerifyReport
from cli.report import format_real, grid_csv, render, rows_to_csv


@pytest.mark.parametrize("value, text", [
    (0.1, "0.1"),
    (1 / 3, "0.3333333333333333"),
    (float("nan"), "nan"),
    (True, "true"),
    (False, "false"),
    (3, "3"),
    (None, ""),
])
def test_format_real(value, text):
    assert format_real(value) == text


def test_rows_to_csv_uses_lf():
    assert rows_to_csv(["a", "b"], [[1.5, None]]) == "a,b\n1.5,\n"


def test_grid_csv_header_follows_reference():
    plain = GridReport(command="deriv", domain="square", function="x*y", params={},
                       rows=[GridRow(x=0.0, y=0.5, value=0.25)])
    assert grid_csv(plain) == "x,y,value\n0.0,0.5,0.25\n"
    referenced = GridReport(command="deriv", domain="square", function="polynomial", params={},
                            rows=[GridRow(x=0.0, y=0.5, value=0.25, reference=0.5, abs_err=0.25)])
    assert grid_csv(referenced).splitlines()[0] == "x,y,value,reference,abs_err"


def test_verify_json_uses_pass_key():
    report = VerifyReport(suite="pde", failed=0, passed=True,
                          checks=[CheckRecord(name="pde solution a", measured=1e-6,
                                              tolerance=1e-4, passed=True)])
    data = json.loads(render(report, OutputFormat.JSON))
    assert data["pass"] is True
    assert data["checks"][0]["pass"] is True
    assert "passed" not in data


def test_verify_csv():
    report = VerifyReport(suite="pde", failed=1, passed=False,
                          checks=[CheckRecord(name="pde solution a", measured=0.5,
                                              tolerance=1e-4, passed=False)])
    assert render(report, OutputFormat.CSV) == "name,measured,tolerance,pass\npde solution a,0.5,0.0001,false\n"


def test_record_csv_flattens_params():
    record = KernelRecord(region="I", params={"a": 1.0, "b": 2.0}, s=0.3, t=0.4, value=0.12)
    header, row = render(record, OutputFormat.CSV).splitlines()
    assert header == "region,a,b,s,t,value"
    assert row == "I,1.0,2.0,0.3,0.4,0.12"


def test_json_round_trips_reals():
    record = KernelRecord(region="V", params={}, s=0.6, t=0.7, value=0.1 + 0.2)
    assert json.loads(render(record, OutputFormat.JSON))["value"] == 0.1 + 0.2
