"""Tabular run results and their on-disk CSV form.

A result file is UTF-8 CSV whose first line is a '#'-prefixed JSON object
carrying the fully resolved configuration and any accuracy warnings; the
second line names the columns.  Floats are written with repr so identical
runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


def _format_cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


@dataclass
class ResultTable:
    columns: list[str]
    rows: list[tuple]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError("rows must match the column count")

    def column(self, name: str) -> np.ndarray:
        i = self.columns.index(name)
        return np.array([row[i] for row in self.rows])

    def write_csv(self, path) -> Path:
        path = Path(path)
        lines = ["# " + json.dumps(self.metadata, sort_keys=True, separators=(",", ":"))]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_format_cell(v) for v in row))
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path


def load_csv(path) -> ResultTable:
    """Parse a file written by ResultTable.write_csv."""
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text or not text[0].startswith("#"):
        raise ValueError(f"{path}: missing metadata header line")
    metadata = json.loads(text[0].lstrip("#").strip())
    columns = text[1].split(",")
    rows = []
    for line in text[2:]:
        if not line:
            continue
        cells = []
        for cell in line.split(","):
            try:
                cells.append(int(cell))
            except ValueError:
                try:
                    cells.append(float(cell))
                except ValueError:
                    cells.append(cell)
        rows.append(tuple(cells))
    return ResultTable(columns=columns, rows=rows, metadata=metadata)
