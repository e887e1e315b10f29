"""CSV ingestion with schema checks.

Each plot kind declares the columns it needs; anything missing, unparseable,
or empty is reported by column name so the caller can exit nonzero instead of
rendering a blank image. Input files are only ever read.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Input CSV does not match the schema the plot kind requires."""


def read_columns(path: str | Path, required: tuple[str, ...],
                 optional: tuple[str, ...] = ()) -> dict[str, np.ndarray]:
    """Load required (and present optional) columns as float arrays.

    Blank fields (e.g. axis2 in a single-axis sweep) come back as NaN.
    """
    path = Path(path)
    try:
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{path}: empty file, no header") from None
            rows = list(reader)
    except OSError as exc:
        raise SchemaError(f"{path}: unreadable ({exc})") from None

    missing = [c for c in required if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column(s) {', '.join(missing)}")
    if not rows:
        raise SchemaError(f"{path}: no data rows (header only)")

    wanted = [c for c in (*required, *optional) if c in header]
    index = {c: header.index(c) for c in wanted}
    out: dict[str, np.ndarray] = {}
    for col, i in index.items():
        values = np.empty(len(rows))
        for r, row in enumerate(rows):
            cell = row[i] if i < len(row) else ""
            if cell == "":
                values[r] = np.nan
            else:
                try:
                    values[r] = float(cell)
                except ValueError:
                    raise SchemaError(
                        f"{path}: column {col!r} has non-numeric value {cell!r}"
                    ) from None
        out[col] = values
    return out


def snapshot_dims(path: str | Path) -> list[str]:
    """dim0, dim1, ... columns present in a snapshot CSV, in order."""
    with open(path, newline="") as fh:
        header = next(csv.reader(fh), [])
    dims = [c for c in header if c.startswith("dim")]
    if not dims:
        raise SchemaError(f"{path}: missing column(s) dim0")
    return dims
