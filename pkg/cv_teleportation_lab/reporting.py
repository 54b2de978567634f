"""Writers for sweep data files and human-readable tables."""

import csv
import json
import logging
import sys
from collections.abc import Iterable, Iterator, Mapping, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import Any, TextIO

from cv_teleportation_lab.models import GoldenRow, InvariantResult, OptimumResult, SweepRow

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("g", "g_prime", "Gx", "Gp", "V", "T", "F", "N", "flags")
GOLDEN_CSV_COLUMNS = ("quantity", "quoted_value", "expected", "computed", "delta", "tolerance", "passed")
OPTIMUM_CSV_COLUMNS = (
    "label",
    "method",
    "parameter",
    "parameter_value",
    "value",
    "residual",
    "parameter_residual",
    "seed",
)
GOLDEN_HEADERS = ("quantity", "quoted value", "computed", "|delta|", "tolerance", "result")
INVARIANT_HEADERS = ("module", "invariant", "result", "detail")


@contextmanager
def open_output(path: Path | None) -> Iterator[TextIO]:
    """Open the output destination, standard output when no path is given.

    :param Path | None path: Output file
    :return Iterator[TextIO]: The writable stream
    """
    if path is None:
        yield sys.stdout
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as stream:
        yield stream
    logger.info("Wrote %s", path)


def _write_records(records: Iterable[dict[str, Any]], columns: Sequence[str], stream: TextIO) -> None:
    writer = csv.DictWriter(stream, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow({key: repr(value) if isinstance(value, float) else value for key, value in record.items()})


def write_csv(rows: Sequence[SweepRow], stream: TextIO) -> None:
    """Write sweep rows as CSV with locale-independent round-trip floats.

    :param Sequence[SweepRow] rows: The sweep rows
    :param TextIO stream: Destination
    """
    _write_records((row.flat() for row in rows), CSV_COLUMNS, stream)


def write_golden_csv(rows: Sequence[GoldenRow], stream: TextIO) -> None:
    """Write golden rows as CSV, one line per published value.

    :param Sequence[GoldenRow] rows: Golden rows
    :param TextIO stream: Destination
    """
    _write_records((row.model_dump() for row in rows), GOLDEN_CSV_COLUMNS, stream)


def write_optima_csv(optima: Mapping[str, OptimumResult], stream: TextIO) -> None:
    """Write optima as CSV in long form, one line per optimizer coordinate.

    :param Mapping[str, OptimumResult] optima: Results keyed by label
    :param TextIO stream: Destination
    """
    records = (
        {
            "label": label,
            "method": result.method.value,
            "parameter": name,
            "parameter_value": coordinate,
            "value": result.value,
            "residual": result.residual,
            "parameter_residual": result.parameter_residual,
            "seed": result.seed,
        }
        for label, result in optima.items()
        for name, coordinate in result.parameters.items()
    )
    _write_records(records, OPTIMUM_CSV_COLUMNS, stream)


def write_json(rows: Sequence[SweepRow], stream: TextIO, indent: int | None = 2) -> None:
    """Write sweep rows as a JSON array.

    :param Sequence[SweepRow] rows: The sweep rows
    :param TextIO stream: Destination
    :param int | None indent: JSON indentation
    """
    json.dump([row.model_dump(mode="json") for row in rows], stream, indent=indent)
    stream.write("\n")


def _cell(value: Any, digits: int) -> str:  # noqa: ANN401
    if isinstance(value, bool):
        return "PASS" if value else "FAIL"
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


def render_table(headers: Sequence[str], rows: Sequence[Sequence[Any]], digits: int = 9) -> str:
    """Render rows as a left-aligned plain-text table.

    :param Sequence[str] headers: Column titles
    :param Sequence[Sequence[Any]] rows: Cell values
    :param int digits: Significant digits of float cells
    :return str: The table, one line per row
    """
    cells = [list(headers), *([_cell(value, digits) for value in row] for row in rows)]
    widths = [max(len(line[column]) for line in cells) for column in range(len(headers))]
    lines = ["  ".join(text.ljust(width) for text, width in zip(line, widths, strict=True)).rstrip() for line in cells]
    lines.insert(1, "  ".join("-" * width for width in widths))
    return "\n".join(lines)


def golden_table(rows: Sequence[GoldenRow], digits: int = 9) -> str:
    """Render the golden table.

    :param Sequence[GoldenRow] rows: Golden rows
    :param int digits: Significant digits of float cells
    :return str: The table
    """
    return render_table(
        GOLDEN_HEADERS,
        [(row.quantity, row.quoted_value, row.computed, row.delta, row.tolerance, row.passed) for row in rows],
        digits,
    )


def invariant_table(results: Sequence[InvariantResult]) -> str:
    """Render invariant outcomes followed by pass and fail counts.

    :param Sequence[InvariantResult] results: Invariant outcomes
    :return str: The table and summary line
    """
    table = render_table(
        INVARIANT_HEADERS,
        [(result.module, result.identifier, result.passed, result.detail) for result in results],
    )
    failed = sum(not result.passed for result in results)
    return f"{table}\n\n{len(results) - failed} passed, {failed} failed"


def optimum_table(label: str, result: OptimumResult, digits: int = 9) -> str:
    """Render one optimum as name/value pairs.

    :param str label: Title of the optimum
    :param OptimumResult result: The optimum
    :param int digits: Significant digits of float cells
    :return str: The table
    """
    rows: list[tuple[str, Any]] = [(name, value) for name, value in result.parameters.items()]
    rows.append(("value", result.value))
    rows.append(("method", result.method.value))
    for name in ("residual", "parameter_residual", "seed"):
        if (value := getattr(result, name)) is not None:
            rows.append((name, value))
    return f"{label}\n{render_table(('parameter', 'value'), rows, digits)}"
