"""Cleaning operations applied in order to a table.

An operation is a dict with an "op" key:

    {"op": "trim"}                                   all columns
    {"op": "trim", "columns": ["a", "b"]}
    {"op": "lowercase", "column": "a"}
    {"op": "replace", "column": "a", "from": "n/a", "to": null}
    {"op": "replace", "column": "a", "from": ",", "to": ".", "substring": true}
    {"op": "cast", "column": "a", "type": "integer"}
    {"op": "drop_rows_where_null", "columns": ["a"]}  omit columns for all
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

from .table import COLUMN_TYPES, Column, DataPrepError, Table
from .types import parse_as

OPS = ("trim", "lowercase", "replace", "cast", "drop_rows_where_null")


@dataclass
class OpLogEntry:
    op: str
    columns: list[str]
    cells_changed: int = 0
    failures: int = 0
    failed_rows: list[int] = field(default_factory=list)
    rows_dropped: int = 0


@dataclass
class CleanResult:
    table: Table
    log: list[OpLogEntry]

    def to_dict(self) -> dict:
        return {"table": self.table.name, "rows": len(self.table.rows), "log": [asdict(e) for e in self.log]}


def _columns(table: Table, op: dict, plural_default_all: bool) -> list[str]:
    if "column" in op:
        cols = [op["column"]]
    elif "columns" in op:
        cols = list(op["columns"])
    elif plural_default_all:
        cols = table.column_names
    else:
        raise DataPrepError(f"operation {op['op']!r} needs a 'column'")
    for c in cols:
        table.index(c)
    return cols


def _map_cells(table: Table, cols: list[str], fn, entry: OpLogEntry) -> None:
    for c in cols:
        i = table.index(c)
        for row in table.rows:
            cell = row[i]
            if cell is None:
                continue
            new = fn(cell)
            if new != cell:
                row[i] = new
                entry.cells_changed += 1


def _apply(table: Table, op: dict) -> OpLogEntry:
    kind = op.get("op")
    if kind not in OPS:
        raise DataPrepError(f"unknown cleaning operation {kind!r} (expected one of {', '.join(OPS)})")
    if kind == "trim":
        cols = _columns(table, op, True)
        entry = OpLogEntry(kind, cols)
        _map_cells(table, cols, str.strip, entry)
    elif kind == "lowercase":
        cols = _columns(table, op, False)
        entry = OpLogEntry(kind, cols)
        _map_cells(table, cols, str.lower, entry)
    elif kind == "replace":
        cols = _columns(table, op, False)
        entry = OpLogEntry(kind, cols)
        if "from" not in op:
            raise DataPrepError("replace needs 'from'")
        old, new = op["from"], op.get("to")
        if op.get("substring"):
            if new is None or old == "":
                raise DataPrepError("substring replace needs a non-empty 'from' and a string 'to'")
            _map_cells(table, cols, lambda cell: cell.replace(old, new), entry)
        else:
            for c in cols:
                i = table.index(c)
                for row in table.rows:
                    if row[i] is not None and row[i] == old:
                        row[i] = new
                        entry.cells_changed += 1
    elif kind == "cast":
        cols = _columns(table, op, False)
        typ = op.get("type")
        if typ not in COLUMN_TYPES:
            raise DataPrepError(f"cast: unknown type {typ!r} (expected one of {', '.join(COLUMN_TYPES)})")
        entry = OpLogEntry(kind, cols)
        for c in cols:
            i = table.index(c)
            for r, row in enumerate(table.rows):
                cell = row[i]
                if cell is None:
                    continue
                value = parse_as(cell, typ)
                if value is None:
                    row[i] = None
                    entry.failures += 1
                    entry.failed_rows.append(r)
                elif value != cell:
                    row[i] = value
                    entry.cells_changed += 1
            old = table.columns[i]
            table.columns[i] = Column(old.name, typ, old.source_name)
    else:
        cols = _columns(table, op, True)
        idx = [table.index(c) for c in cols]
        entry = OpLogEntry(kind, cols)
        kept = [row for row in table.rows if all(row[i] is not None for i in idx)]
        entry.rows_dropped = len(table.rows) - len(kept)
        table.rows = kept
    return entry


def clean(table: Table, ops: list[dict]) -> CleanResult:
    """Apply `ops` in order to a copy of `table`; the input is not modified."""
    out = table.copy()
    log = [_apply(out, op) for op in ops]
    return CleanResult(out, log)
