import csv
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List

import numpy as np

from src.experiments.base import Report
from src.spectral.pspace import write_matrix_file

log = logging.getLogger(__name__)

PLOT_DIR_NAME = "plot"
REPORT_FILE_NAME = "report.json"


def format_value(value: Any) -> str:
    """
    Formats a table cell so that reruns produce byte-identical files.

    Floats use 17 significant digits, booleans are written as true/false and None as an empty cell.
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return "%.17g" % float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return f"{'%.17g' % value.real}{'%+.17g' % value.imag}j"
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return _jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else format_value(value)
    if isinstance(value, (complex, np.complexfloating)):
        return format_value(value)
    if value is None or isinstance(value, str):
        return value
    return str(value)


def _write_table(path: Path, columns: List[str], rows: List[List[Any]]):
    with open(path, "w", newline="", encoding="utf-8") as file:
        writer = csv.writer(file, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_value(value) for value in row])


def report_payload(name: str, report: Report) -> Dict[str, Any]:
    """
    The JSON document of a report: every table, the diagnostics, suite counts and failures.
    """
    return _jsonable({
        "experiment": name,
        "tables": {key: {"columns": table.columns, "rows": table.rows} for key, table in report.tables.items()},
        "diagnostics": report.diagnostics,
        "suites": {suite: {"passed": passed, "failed": failed} for suite, (passed, failed) in report.suites.items()},
        "failures": [failure.model_dump() for failure in report.failures],
    })


def write_report(name: str, report: Report, output_dir: str) -> Path:
    """
    Writes a report under `<output_dir>/<name>/`: one CSV per table, `report.json`, the matrix files and the
    plot data.

    Args:
        name (str): The qualified name of the experiment.
        report (Report): The report.
        output_dir (str): The output root directory.

    Returns:
        Path: The directory of the report.
    """
    directory = Path(output_dir) / name
    directory.mkdir(parents=True, exist_ok=True)

    for key, table in report.tables.items():
        _write_table(directory / f"{key}.csv", table.columns, table.rows)
    (directory / REPORT_FILE_NAME).write_text(
        json.dumps(report_payload(name, report), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    for stem, matrix in report.matrices.items():
        write_matrix_file(str(directory / f"{stem}.txt"), matrix)
    emit_plotdata(report, directory)

    log.info(f"Wrote {len(report.tables)} tables and {len(report.matrices)} matrices to: '{directory}'")
    return directory


def emit_plotdata(report: Report, directory: Path) -> List[Path]:
    """
    Writes one two-column (x, y) text file per series of the report under `<directory>/plot/`.

    Returns:
        List[Path]: The written files, in series order.
    """
    if not report.series:
        return []
    plot_dir = Path(directory) / PLOT_DIR_NAME
    plot_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for key, points in report.series.items():
        path = plot_dir / f"{key}.dat"
        path.write_text("".join(f"{format_value(x)} {format_value(y)}\n" for x, y in points), encoding="utf-8")
        paths.append(path)
    log.debug(f"Wrote {len(paths)} plot series to: '{plot_dir}'")
    return paths
