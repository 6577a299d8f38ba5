"""
Rendering and writing of command output.

All output is UTF-8 and ends with a newline. CSV columns are fixed:

    suite report:  name,status,metric,tolerance,points_tested,details
    phi table:     k,m,closed_form,quadrature,abs_diff
    residuals:     r,theta,phi,residual,field,relative
"""

import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

from src.core.enums import OutputFormat
from src.schemas.verify import SuiteReport

SUITE_COLUMNS = ("name", "status", "metric", "tolerance", "points_tested", "details")
TABLE_COLUMNS = ("k", "m", "closed_form", "quadrature", "abs_diff")
RESIDUAL_COLUMNS = ("r", "theta", "phi", "residual", "field", "relative")


def format_complex(z: complex) -> str:
    return f"{z.real:.12g}{z.imag:+.12g}i"


def complex_pair(z: complex) -> list[float]:
    return [z.real, z.imag]


def rows_to_csv(columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows(rows)
    return buffer.getvalue()


def to_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


def write_output(text: str, path: Optional[str] = None) -> None:
    """Write ``text`` to ``path`` (stdout when None or '-'), newline-terminated."""
    if not text.endswith("\n"):
        text += "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    Path(path).write_text(text, encoding="utf-8")


# --- suite report ---


def render_suite(report: SuiteReport, fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return report.model_dump_json(indent=2)
    if fmt == OutputFormat.CSV:
        return rows_to_csv(
            SUITE_COLUMNS,
            (
                (
                    c.name,
                    c.status.value,
                    "" if c.metric is None else repr(c.metric),
                    repr(c.tolerance),
                    c.points_tested,
                    c.details,
                )
                for c in report.checks
            ),
        )
    return render_suite_text(report)


def render_suite_text(report: SuiteReport) -> str:
    lines = []
    for c in report.checks:
        metric = "null" if c.metric is None else f"{c.metric:.3e}"
        lines.append(f"{c.status.value.upper():<15} {c.name}  metric={metric} tol={c.tolerance:.1e}")
    failed = len(report.failed)
    lines.append(
        f"{report.status.value}: {len(report.checks) - failed}/{len(report.checks)} checks passed "
        f"in {report.wall_time_ms:.0f} ms"
    )
    return "\n".join(lines)
