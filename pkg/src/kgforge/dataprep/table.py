"""In-memory table model shared by ingestion, profiling, cleaning and joins."""

from __future__ import annotations

from dataclasses import dataclass, field

COLUMN_TYPES = ("string", "integer", "decimal", "boolean", "date", "datetime")


class DataPrepError(Exception):
    pass


@dataclass(frozen=True)
class Column:
    name: str
    declared_type: str | None = None
    # header text before de-duplication or synthesis, None when identical to name
    source_name: str | None = None

    def __post_init__(self):
        if self.declared_type is not None and self.declared_type not in COLUMN_TYPES:
            raise DataPrepError(f"column {self.name!r}: unknown type {self.declared_type!r}")


@dataclass
class Table:
    name: str
    columns: list[Column]
    rows: list[list[str | None]] = field(default_factory=list)
    # True when the column names were synthesised because the source had no header
    synthetic_header: bool = False

    def __post_init__(self):
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            dup = next(n for n in names if names.count(n) > 1)
            raise DataPrepError(f"table {self.name!r}: duplicate column name {dup!r}")
        width = len(self.columns)
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise DataPrepError(f"table {self.name!r}: row {i} has {len(row)} cells, expected {width}")

    @property
    def column_names(self) -> list[str]:
        return [c.name for c in self.columns]

    def index(self, column: str) -> int:
        for i, c in enumerate(self.columns):
            if c.name == column:
                return i
        raise DataPrepError(f"table {self.name!r} has no column {column!r}")

    def column(self, name: str) -> Column:
        return self.columns[self.index(name)]

    def values(self, column: str) -> list[str | None]:
        i = self.index(column)
        return [row[i] for row in self.rows]

    def records(self) -> list[dict[str, str | None]]:
        names = self.column_names
        return [dict(zip(names, row)) for row in self.rows]

    def copy(self) -> "Table":
        return Table(self.name, list(self.columns), [list(r) for r in self.rows], self.synthetic_header)

    def __len__(self):
        return len(self.rows)
