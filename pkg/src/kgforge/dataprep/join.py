"""Denormalizing joins."""

from __future__ import annotations

from dataclasses import dataclass

from .table import Column, DataPrepError, Table


@dataclass(frozen=True)
class JoinSpec:
    left_table: str
    right_table: str
    left_key: str
    right_key: str
    kind: str = "left"
    column_prefixing: bool = True
    name: str | None = None  # output table name; defaults to the left table's

    @classmethod
    def from_dict(cls, data: dict) -> "JoinSpec":
        try:
            return cls(**data)
        except TypeError as exc:
            raise DataPrepError(f"invalid join spec: {exc}") from None


def denormalize(tables: dict[str, Table], spec: JoinSpec) -> Table:
    """Join two tables into one flat table.

    The right key column is not repeated in the output. Null keys never
    match. Matches come out in left-row order, then right-row order.
    """
    if spec.kind not in ("inner", "left"):
        raise DataPrepError(f"join kind must be 'inner' or 'left', got {spec.kind!r}")
    for tname in (spec.left_table, spec.right_table):
        if tname not in tables:
            raise DataPrepError(f"join refers to unknown table {tname!r}")
    left, right = tables[spec.left_table], tables[spec.right_table]
    for t, key in ((left, spec.left_key), (right, spec.right_key)):
        if key not in t.column_names:
            raise DataPrepError(f"table {t.name!r} has no key column {key!r}")
    lk, rk = left.index(spec.left_key), right.index(spec.right_key)
    keep = [i for i in range(len(right.columns)) if i != rk]
    right_cols = []
    for i in keep:
        col = right.columns[i]
        name = f"{right.name}.{col.name}" if spec.column_prefixing else col.name
        right_cols.append(Column(name, col.declared_type))
    clash = set(left.column_names) & {c.name for c in right_cols}
    if clash:
        raise DataPrepError(
            f"joining {left.name!r} and {right.name!r}: column name clash on {', '.join(sorted(clash))}; "
            "enable column_prefixing"
        )
    index: dict[str, list[list]] = {}
    for row in right.rows:
        if row[rk] is not None:
            index.setdefault(row[rk], []).append(row)
    rows = []
    empty = [None] * len(keep)
    for row in left.rows:
        matches = index.get(row[lk], []) if row[lk] is not None else []
        for other in matches:
            rows.append(list(row) + [other[i] for i in keep])
        if not matches and spec.kind == "left":
            rows.append(list(row) + empty)
    return Table(spec.name or left.name, list(left.columns) + right_cols, rows)
