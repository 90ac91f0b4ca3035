"""Reading and writing sample tables as CSV.

The format is UTF-8, comma separated, with a header naming the columns ``id``, ``x``, ``y``,
any number of variables and optionally ``stratum``.
"""

import csv
import io
import logging
import math
from pathlib import Path
from typing import TextIO

from .errors import EmptyInputError, FileAccessError, FormatError
from .table import SampleRow, SampleTable

logger = logging.getLogger(__name__)

REQUIRED_COLUMNS = ("id", "x", "y")
STRATUM_COLUMN = "stratum"


def ingest_csv(path: Path | str, warnings: list[str] | None = None) -> SampleTable:
    """Read a sample table.

    Rows with a blank, non-numeric or non-finite value are rejected; a summary of the
    rejections is logged and appended to ``warnings``.

    :raises FormatError: If a required column is missing or ids repeat.
    :raises FileAccessError: If the file cannot be read or is not UTF-8.
    :raises EmptyInputError: If no valid row remains.
    """
    origin = "cli.ingest_csv"
    try:
        text = Path(path).read_text(encoding="utf-8-sig")
    except (OSError, UnicodeDecodeError) as error:
        raise FileAccessError(f"{path}: cannot read as UTF-8 ({error}).", origin=origin) from None

    reader = csv.reader(io.StringIO(text, newline=""))
    header = [h.strip() for h in next(reader, [])]

    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise FormatError(f"{path}: missing column(s) {', '.join(missing)}.", origin=origin)
    if len(set(header)) != len(header):
        raise FormatError(f"{path}: repeated column names.", origin=origin)

    variables = [h for h in header if h not in (*REQUIRED_COLUMNS, STRATUM_COLUMN)]
    rows: list[SampleRow] = []
    seen: set[str] = set()
    rejected: list[int] = []
    for line, cells in enumerate(reader, start=2):
        if not any(c.strip() for c in cells):
            continue
        row = _parse_row(dict(zip(header, (c.strip() for c in cells))), variables)
        if row is None or len(cells) != len(header):
            rejected.append(line)
            continue
        if row.id in seen:
            raise FormatError(f"{path}: duplicate id '{row.id}' (line {line}).", origin=origin)
        seen.add(row.id)
        rows.append(row)

    if rejected:
        message = (
            f"Rejected {len(rejected)} row(s) with missing or non-numeric values "
            f"(line(s) {', '.join(map(str, rejected))})."
        )
        logger.warning(message)
        if warnings is not None:
            warnings.append(message)
    if not rows:
        raise EmptyInputError(f"{path}: no valid rows.", origin=origin)

    logger.info("Read %d rows with variables %s from %s", len(rows), variables, path)
    return SampleTable(rows, variables=variables)


def write_csv(table: SampleTable, stream: TextIO) -> None:
    """Write ``table`` in the format read by ``ingest_csv``.

    Numbers are written in their shortest round-trip form, so equal tables give equal bytes.
    """
    with_stratum = any(r.stratum_override is not None for r in table)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(
        [*REQUIRED_COLUMNS, *table.variables, *([STRATUM_COLUMN] if with_stratum else [])]
    )
    for row in table:
        writer.writerow(
            [
                row.id,
                repr(row.x),
                repr(row.y),
                *(repr(row.values[v]) for v in table.variables),
                *([row.stratum_override or ""] if with_stratum else []),
            ]
        )


def _parse_row(cells: dict[str, str], variables: list[str]) -> SampleRow | None:
    try:
        numbers = {name: float(cells[name]) for name in ("x", "y", *variables)}
    except (KeyError, ValueError):
        return None
    if not cells["id"] or not all(math.isfinite(v) for v in numbers.values()):
        return None
    return SampleRow(
        id=cells["id"],
        x=numbers["x"],
        y=numbers["y"],
        values={v: numbers[v] for v in variables},
        stratum_override=cells.get(STRATUM_COLUMN) or None,
    )
