"""Sweep tables and their CSV / JSON serialisation.

Floats are written with 17 significant digits, which round-trips every
binary64 value.  Non-finite values (sentinel rows at singular points) are
written as ``nan`` in CSV and ``null`` in JSON.
"""

from __future__ import annotations

import io
import json
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence


@dataclass
class SweepTable:
    columns: List[str]
    units: List[str]
    rows: List[List[Any]] = field(default_factory=list)
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("columns and units must have the same length")

    def append(self, row: Sequence[Any]):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} values, table has {len(self.columns)} columns")
        self.rows.append(list(row))

    def column(self, name):
        i = self.columns.index(name)
        return [r[i] for r in self.rows]


def format_number(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".17g")


def _json_number(v) -> str:
    if isinstance(v, (bool, int)):
        return format_number(v)
    v = float(v)
    return format_number(v) if math.isfinite(v) else "null"


def to_csv(table: SweepTable) -> str:
    buf = io.StringIO()
    for key in sorted(table.meta):
        buf.write(f"# {key}: {table.meta[key]}\n")
    buf.write(",".join(table.columns) + "\n")
    buf.write(",".join(table.units) + "\n")
    for row in table.rows:
        buf.write(",".join(format_number(v) for v in row) + "\n")
    return buf.getvalue()


def to_json(table: SweepTable) -> str:
    meta = json.dumps(table.meta, sort_keys=True)
    cols = json.dumps([{"name": c, "unit": u} for c, u in zip(table.columns, table.units)])
    rows = ",\n  ".join("[" + ",".join(_json_number(v) for v in r) + "]" for r in table.rows)
    body = f"\n  {rows}\n" if table.rows else ""
    return f'{{"meta": {meta},\n "columns": {cols},\n "rows": [{body}]}}\n'


def from_json(text: str) -> SweepTable:
    data = json.loads(text)
    cols = [c["name"] for c in data["columns"]]
    units = [c["unit"] for c in data["columns"]]
    rows = [[math.nan if v is None else v for v in r] for r in data["rows"]]
    return SweepTable(cols, units, rows, data["meta"])


def render(table: SweepTable, fmt: str) -> str:
    if fmt == "csv":
        return to_csv(table)
    if fmt == "json":
        return to_json(table)
    raise ValueError(f"unknown output format {fmt!r}")


def emit(table: SweepTable, fmt: str, path) -> None:
    """Write ``table`` to ``path`` (``-`` or None for stdout)."""
    text = render(table, fmt)
    if path is None or str(path) == "-":
        import sys
        sys.stdout.write(text)
        return
    try:
        parent = os.path.dirname(os.fspath(path))
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write output to {path}: {exc.strerror or exc}") from exc
