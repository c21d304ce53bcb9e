import json
import math

import numpy as np
import pytest

from src.app.reports import PLOT_DIR_NAME, REPORT_FILE_NAME, emit_plotdata, format_value, report_payload, write_report
from src.experiments.base import Failure, Report, Table
from src.spectral.pspace import OperatorMatrix, WeightedPointSpace, read_matrix_file


@pytest.mark.parametrize("value, expected", [
    (None, ""),
    (True, "true"),
    (np.bool_(False), "false"),
    (3, "3"),
    (np.int64(-2), "-2"),
    (0.1, "0.10000000000000001"),
    (math.inf, "inf"),
    (1 - 2j, "1-2j"),
    ("point:0", "point:0"),
])
def test_format_value(value, expected):
    assert format_value(value) == expected


def _report() -> Report:
    table = Table(columns=["p", "lower", "upper", "certified"])
    table.add(1.0, 0.5, 0.75, True)
    table.add(2.0, 1 / 3, math.inf, False)
    space = WeightedPointSpace.counting(2)
    return Report(
        tables={"norms": table},
        series={"lower": [(1.0, 0.5), (2.0, 1 / 3)]},
        diagnostics={"levels": np.array([1, 2]), "value": math.nan},
        matrices={"witness": OperatorMatrix(domain=space, codomain=space, entries=np.diag([1.0, -1.0]))},
        failures=[Failure(suite="norm", check="interval", detail="lower > upper")],
        suites={"norm": (3, 1)},
    )


def test_table_rejects_rows_of_the_wrong_width():
    with pytest.raises(ValueError):
        Table(columns=["a", "b"]).add(1)


def test_report_payload():
    payload = report_payload("norm.small", _report())

    assert payload["experiment"] == "norm.small"
    assert payload["tables"]["norms"]["rows"][1] == [2.0, 1 / 3, "inf", False]
    assert payload["diagnostics"] == {"levels": [1, 2], "value": "nan"}
    assert payload["suites"] == {"norm": {"passed": 3, "failed": 1}}
    assert payload["failures"] == [{"suite": "norm", "check": "interval", "detail": "lower > upper"}]
    json.dumps(payload, allow_nan=False)


def test_write_report(tmp_path):
    directory = write_report("norm.small", _report(), str(tmp_path))

    assert directory == tmp_path / "norm.small"
    assert (directory / "norms.csv").read_text().splitlines() == [
        "p,lower,upper,certified",
        "1,0.5,0.75,true",
        "2,0.33333333333333331,inf,false",
    ]
    assert json.loads((directory / REPORT_FILE_NAME).read_text())["experiment"] == "norm.small"
    assert np.array_equal(read_matrix_file(str(directory / "witness.txt")).entries, np.diag([1.0, -1.0]))
    assert (directory / PLOT_DIR_NAME / "lower.dat").read_text() == "1 0.5\n2 0.33333333333333331\n"


def test_reports_are_byte_identical_across_writes(tmp_path):
    first = write_report("norm.small", _report(), str(tmp_path / "first"))
    second = write_report("norm.small", _report(), str(tmp_path / "second"))

    for path in sorted(first.rglob("*")):
        if path.is_file():
            assert path.read_bytes() == (second / path.relative_to(first)).read_bytes()


def test_emit_plotdata_without_series(tmp_path):
    assert emit_plotdata(Report(), tmp_path) == []
    assert not (tmp_path / PLOT_DIR_NAME).exists()
