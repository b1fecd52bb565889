"""Result tables and their CSV / JSON / plot-data serialisations."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

FORMATS = ("csv", "json", "plotdata")


def _plain(value):
    """Convert numpy scalars to builtin Python values."""
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass(frozen=True)
class ResultTable:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...] = ()
    meta: dict[str, Any] = field(default_factory=dict)
    # (x column, y column) pairs exported by the plotdata format
    plots: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        cols = tuple(self.columns)
        rows = tuple(tuple(_plain(v) for v in row) for row in self.rows)
        for i, row in enumerate(rows):
            if len(row) != len(cols):
                raise ValueError(f"row {i} has {len(row)} values for {len(cols)} columns")
        for x, y in self.plots:
            if x not in cols or y not in cols:
                raise ValueError(f"plot pair ({x}, {y}) names unknown columns")
        object.__setattr__(self, "columns", cols)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "plots", tuple(tuple(p) for p in self.plots))

    def __len__(self):
        return len(self.rows)

    def column(self, name: str) -> list:
        i = self.columns.index(name)
        return [row[i] for row in self.rows]

    def with_meta(self, **extra) -> "ResultTable":
        return ResultTable(self.columns, self.rows, {**self.meta, **extra}, self.plots)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def to_csv(table: ResultTable) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def to_json(table: ResultTable) -> bytes:
    doc = {"meta": table.meta, "columns": list(table.columns),
           "rows": [list(r) for r in table.rows]}
    return (json.dumps(doc, indent=2, default=_plain) + "\n").encode("utf-8")


def from_json(data: bytes | str) -> ResultTable:
    doc = json.loads(data)
    return ResultTable(tuple(doc["columns"]), tuple(tuple(r) for r in doc["rows"]),
                       doc.get("meta", {}))


def to_plotdata(table: ResultTable) -> bytes:
    """gnuplot-style blocks, one per declared (x, y) pair, two blank lines apart."""
    blocks = []
    for x, y in table.plots:
        xs, ys = table.column(x), table.column(y)
        lines = [f"# {y} vs {x}", f"# {x} {y}"]
        lines += [f"{_fmt(a)} {_fmt(b)}" for a, b in zip(xs, ys)]
        blocks.append("\n".join(lines) + "\n")
    return "\n\n".join(blocks).encode("utf-8")


def emit(table: ResultTable, fmt: str = "csv") -> bytes:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    if fmt == "plotdata":
        return to_plotdata(table)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def is_non_increasing(values: Sequence[float], slack: float = 0.0) -> bool:
    return all(b <= a + slack for a, b in zip(values, values[1:]))


def is_strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))
