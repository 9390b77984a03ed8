from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

from app.application.dto import StatisticsDTO
from app.application.exceptions import ConfigFileError

# Metadata key naming the columns ``emit_plot_data`` keeps, space separated.
PLOT_COLUMNS_KEY = "plot_columns"


@dataclass(frozen=True)
class Table:
    """CSV artifact: ``# key: value`` header lines, one column row, data rows."""

    metadata: dict[str, str]
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]


def cell(value: object) -> str:
    """Render one value; floats keep their shortest round-trip form."""
    match value:
        case None:
            return ""
        case bool():
            return str(value).lower()
        case float():
            return repr(value)
        case _:
            return str(value)


def write_table(
    metadata: Mapping[str, str], columns: Sequence[str], rows: Iterable[Sequence[object]]
) -> str:
    buf = io.StringIO()
    for key, value in metadata.items():
        buf.write(f"# {key}: {value}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    writer.writerows([cell(v) for v in row] for row in rows)
    return buf.getvalue()


def read_table(text: str) -> Table:
    """Parse a CSV artifact.

    Raises:
        ConfigFileError: On a missing column row or ragged data rows.
    """
    metadata: dict[str, str] = {}
    body: list[str] = []
    for line in text.splitlines():
        if not body and line.startswith("#"):
            key, sep, value = line[1:].partition(":")
            if not sep:
                raise ConfigFileError(f"Malformed metadata line {line!r}.")
            metadata[key.strip()] = value.strip()
        elif line.strip():
            body.append(line)
    if not body:
        raise ConfigFileError("CSV has no column row.")
    try:
        parsed = list(csv.reader(body, strict=True))
    except csv.Error as e:
        raise ConfigFileError(f"Malformed CSV: {e}.") from e
    columns = tuple(c.strip() for c in parsed[0])
    rows = tuple(tuple(v.strip() for v in row) for row in parsed[1:])
    for k, row in enumerate(rows, start=2):
        if len(row) != len(columns):
            raise ConfigFileError(
                f"CSV line {k} has {len(row)} fields, the column row has {len(columns)}."
            )
    return Table(metadata, columns, rows)


def write_statistics(dto: StatisticsDTO) -> str:
    """Render statistics as the CSV read by the statistics loader."""
    metadata = {"scheme": dto.scheme, "squashed": cell(dto.squashed)}
    for key in ("double_click", "effective_error", "cross_click"):
        value = getattr(dto, key)
        if value is not None:
            metadata[key] = cell(float(value))
    return write_table(metadata, ("x", "y", "probability"), dto.rows)


def _number(text: str) -> float | None:
    try:
        value = float(text)
    except ValueError:
        return None
    return value if math.isfinite(value) else None


def emit_plot_data(text: str) -> str:
    """Reformat a CSV artifact as whitespace-separated gnuplot columns.

    Columns come from the ``plot_columns`` metadata entry when present,
    otherwise every column holding only numbers or blanks. Non-numeric cells
    become ``NaN``; row order is kept.

    Raises:
        ConfigFileError: On malformed CSV or unknown plot columns.
    """
    table = read_table(text)
    if PLOT_COLUMNS_KEY in table.metadata:
        names = tuple(table.metadata[PLOT_COLUMNS_KEY].split())
        unknown = [n for n in names if n not in table.columns]
        if unknown:
            raise ConfigFileError(f"Plot columns {unknown} are not in the table.")
    else:
        names = tuple(
            name
            for k, name in enumerate(table.columns)
            if all(_number(row[k]) is not None or not row[k] for row in table.rows)
        )
    index = [table.columns.index(n) for n in names]

    lines = [
        f"# {key}: {value}" for key, value in table.metadata.items() if key != PLOT_COLUMNS_KEY
    ]
    lines.append("# " + " ".join(names))
    for row in table.rows:
        values = (_number(row[k]) for k in index)
        lines.append(" ".join("NaN" if v is None else repr(v) for v in values))
    return "\n".join(lines) + "\n"
