"""JSON and CSV rendering of command results.

Reals are written in their shortest round-trip form (at most 17 significant
digits), so re-parsing a report reproduces every value bit for bit. Field
order is the model's declaration order and nothing time-dependent is written.
"""
import csv
import io
import logging
import math
import sys
from typing import Any, Iterable, List, Optional, Sequence

from pydantic import BaseModel

from .models import GridReport, OutputFormat, VerifyReport

logger = logging.getLogger(__name__)


def format_real(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else "nan"
    return str(value)


def to_json(record: BaseModel) -> str:
    return record.model_dump_json(indent=2, by_alias=True, exclude_none=True) + "\n"


def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV with a header row, ',' separators and LF line endings"""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_real(cell) for cell in row])
    return buffer.getvalue()


def _flatten(data: dict) -> List[tuple]:
    items = []
    for key, value in data.items():
        if isinstance(value, dict):
            items.extend(_flatten(value))
        else:
            items.append((key, value))
    return items


def record_csv(record: BaseModel) -> str:
    """One-row CSV of a flat record; nested parameter maps become columns"""
    items = _flatten(record.model_dump(by_alias=True, exclude_none=True))
    return rows_to_csv([key for key, _ in items], [[value for _, value in items]])


def grid_csv(report: GridReport) -> str:
    with_reference = any(row.reference is not None for row in report.rows)
    header = ["x", "y", "value"] + (["reference", "abs_err"] if with_reference else [])
    rows = []
    for row in report.rows:
        cells = [row.x, row.y, row.value]
        if with_reference:
            cells += [row.reference, row.abs_err]
        rows.append(cells)
    return rows_to_csv(header, rows)


def checks_csv(report: VerifyReport) -> str:
    return rows_to_csv(["name", "measured", "tolerance", "pass"],
                       [[c.name, c.measured, c.tolerance, c.passed] for c in report.checks])


def render(record: BaseModel, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return to_json(record)
    if isinstance(record, GridReport):
        return grid_csv(record)
    if isinstance(record, VerifyReport):
        return checks_csv(record)
    return record_csv(record)


def emit(text: str, output: Optional[str] = None):
    """Write a report to output, or to stdout when no path is given"""
    if output is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(output, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    logger.info(f"report written to {output}")
