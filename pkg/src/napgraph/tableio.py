"""Coordinate-table CSV ingestion and serialization.

The table layout is one row per sample and one (x, y) column pair per
assessor, in cm:

    # sheet_cm: 60x40
    sample,ann_x,ann_y,bob_x,bob_y
    w1,12.5,30.1,8.0,22.0
    w2,40.0,10.0,41.5,12.25

The sheet comment is optional (60x40 assumed).  Decimal point, comma
separator.  Parsing keeps the original cell text so writing a parsed table
back out reproduces the input bytes; tables built from in-memory values are
written with shortest round-tripping float text.
"""

from __future__ import annotations

import io
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .geometry import DEFAULT_SHEET, Sheet, Tablecloth


class ParseError(ValueError):
    """CSV input that cannot be interpreted; carries file position context."""

    def __init__(self, message: str, row: int | None = None, col: int | None = None):
        self.row = row
        self.col = col
        where = ""
        if row is not None:
            where = f" (row {row}" + (f", column {col})" if col is not None else ")")
        super().__init__(message + where)


class OutOfSheetWarning(UserWarning):
    """A coordinate falls outside the sheet bounds (kept, not rejected)."""


class CoincidentSamplesWarning(UserWarning):
    """Two samples of one tablecloth share an identical position."""


_SHEET_RE = re.compile(r"#\s*sheet_cm\s*:\s*([0-9.]+)\s*[xX,\s]\s*([0-9.]+)")


@dataclass(eq=False)
class CoordinateTable:
    sample_names: list[str]
    assessor_ids: list[str]
    values: np.ndarray  # (S, 2A) float64
    cell_text: list[list[str]]  # original decimal text, same shape as values
    sheet: Sheet = DEFAULT_SHEET

    @property
    def sample_count(self) -> int:
        return len(self.sample_names)

    @property
    def assessor_count(self) -> int:
        return len(self.assessor_ids)

    def __eq__(self, other):
        if not isinstance(other, CoordinateTable):
            return NotImplemented
        return (
            self.sample_names == other.sample_names
            and self.assessor_ids == other.assessor_ids
            and self.sheet == other.sheet
            and np.array_equal(self.values, other.values)
        )


def parse_table(data: bytes | str, delimiter: str = ",") -> CoordinateTable:
    """Parse a coordinate table, inferring S and A from its shape."""
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    sheet = DEFAULT_SHEET
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(io.StringIO(text), start=1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if line.lstrip().startswith("#"):
            match = _SHEET_RE.search(line)
            if match:
                sheet = Sheet(float(match.group(1)), float(match.group(2)))
            continue
        rows.append((lineno, [cell.strip() for cell in line.split(delimiter)]))

    if not rows:
        raise ParseError("empty table")
    header_line, header = rows[0]
    if len(header) < 3:
        raise ParseError("header needs a sample column plus coordinate columns", row=header_line)
    value_cols = len(header) - 1
    if value_cols % 2 != 0:
        raise ParseError(
            f"odd coordinate column count ({value_cols}); columns must pair as _x,_y",
            row=header_line,
        )
    assessor_ids = []
    for a in range(value_cols // 2):
        cx, cy = header[1 + 2 * a], header[2 + 2 * a]
        if not (cx.endswith("_x") and cy.endswith("_y") and cx[:-2] == cy[:-2] and cx[:-2]):
            raise ParseError(
                f"expected '<id>_x','<id>_y' column pair, got {cx!r},{cy!r}",
                row=header_line,
                col=2 + 2 * a,
            )
        assessor_ids.append(cx[:-2])
    if len(set(assessor_ids)) != len(assessor_ids):
        raise ParseError("duplicate assessor ids in header", row=header_line)

    sample_names: list[str] = []
    values: list[list[float]] = []
    cell_text: list[list[str]] = []
    for lineno, cells in rows[1:]:
        if len(cells) != len(header):
            raise ParseError(
                f"expected {len(header)} columns, found {len(cells)}", row=lineno
            )
        name = cells[0]
        if not name:
            raise ParseError("empty sample name", row=lineno, col=1)
        if name in sample_names:
            raise ParseError(f"duplicate sample name {name!r}", row=lineno, col=1)
        sample_names.append(name)
        row_vals = []
        for c, cell in enumerate(cells[1:], start=2):
            try:
                v = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric cell {cell!r}", row=lineno, col=c) from None
            if not np.isfinite(v):
                raise ParseError(f"non-finite cell {cell!r}", row=lineno, col=c)
            row_vals.append(v)
        values.append(row_vals)
        cell_text.append(list(cells[1:]))

    if len(sample_names) < 2:
        raise ParseError("need at least 2 samples")
    return CoordinateTable(
        sample_names=sample_names,
        assessor_ids=assessor_ids,
        values=np.array(values, dtype=np.float64),
        cell_text=cell_text,
        sheet=sheet,
    )


def write_table(table: CoordinateTable) -> str:
    """Serialize a table; cells reuse the text they were parsed from."""
    lines = [f"# sheet_cm: {_num(table.sheet.width)}x{_num(table.sheet.height)}"]
    header = ["sample"]
    for aid in table.assessor_ids:
        header += [f"{aid}_x", f"{aid}_y"]
    lines.append(",".join(header))
    for s, name in enumerate(table.sample_names):
        lines.append(",".join([name] + table.cell_text[s]))
    return "\n".join(lines) + "\n"


def _num(value: float) -> str:
    text = repr(float(value))
    return text[:-2] if text.endswith(".0") else text


def table_to_tablecloths(table: CoordinateTable) -> list[Tablecloth]:
    """Split the table into per-assessor tablecloths, warning on positions
    outside the sheet and on coincident samples (both accepted)."""
    cloths = []
    for a, aid in enumerate(table.assessor_ids):
        positions = table.values[:, 2 * a : 2 * a + 2].copy()
        cloth = Tablecloth(assessor_id=aid, sheet=table.sheet, positions=positions)
        outside = cloth.out_of_sheet_indices()
        if outside:
            names = ", ".join(table.sample_names[i] for i in outside)
            warnings.warn(
                f"assessor {aid!r}: samples outside the {_num(table.sheet.width)}x"
                f"{_num(table.sheet.height)} cm sheet: {names}",
                OutOfSheetWarning,
                stacklevel=2,
            )
        coincident = cloth.coincident_pairs()
        if coincident:
            pairs = ", ".join(
                f"{table.sample_names[i]}={table.sample_names[j]}" for i, j in coincident
            )
            warnings.warn(
                f"assessor {aid!r}: coincident samples ({pairs}); coincident pairs "
                "connect unless a third sample shares the spot",
                CoincidentSamplesWarning,
                stacklevel=2,
            )
        cloths.append(cloth)
    return cloths


def tablecloths_to_table(
    tablecloths: list[Tablecloth], sample_names: list[str], sheet: Sheet | None = None
) -> CoordinateTable:
    """Build a table from in-memory tablecloths (canonical float text)."""
    if not tablecloths:
        raise ValueError("need at least one tablecloth")
    sheet = sheet or tablecloths[0].sheet
    n = len(sample_names)
    for t in tablecloths:
        if t.sample_count != n:
            raise ValueError(
                f"tablecloth {t.assessor_id!r} has {t.sample_count} samples, expected {n}"
            )
    values = np.hstack([t.positions for t in tablecloths])
    cell_text = [[repr(float(v)) for v in row] for row in values]
    return CoordinateTable(
        sample_names=list(sample_names),
        assessor_ids=[t.assessor_id for t in tablecloths],
        values=values,
        cell_text=cell_text,
        sheet=sheet,
    )
