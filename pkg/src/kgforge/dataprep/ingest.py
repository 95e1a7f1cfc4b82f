"""CSV/TSV ingestion."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path

from .table import Column, DataPrepError, Table


@dataclass
class IngestOptions:
    delimiter: str = ","
    has_header: bool = True
    null_markers: list[str] = field(default_factory=lambda: [""])
    encoding: str = "utf-8"

    @classmethod
    def from_dict(cls, data: dict | None) -> "IngestOptions":
        data = dict(data or {})
        unknown = set(data) - {"delimiter", "has_header", "null_markers", "encoding"}
        if unknown:
            raise DataPrepError(f"unknown ingest option(s): {', '.join(sorted(unknown))}")
        opts = cls(**data)
        if len(opts.delimiter) != 1:
            raise DataPrepError(f"delimiter must be a single character, got {opts.delimiter!r}")
        return opts


def _decode(data: bytes, encoding: str, path: Path) -> str:
    try:
        text = data.decode(encoding)
    except UnicodeDecodeError as exc:
        head = data[: exc.start]
        line = head.count(b"\n") + 1
        column = exc.start - (head.rfind(b"\n") + 1) + 1
        raise DataPrepError(f"{path}: undecodable bytes at line {line}, byte column {column} ({exc.reason})") from None
    return text[1:] if text.startswith("\ufeff") else text


def _unique_names(raw: list[str]) -> list[Column]:
    columns: list[Column] = []
    used: set[str] = set()
    for i, header in enumerate(raw, 1):
        name = header.strip() or f"col{i}"
        base, n = name, 1
        while name in used:
            n += 1
            name = f"{base}_{n}"
        used.add(name)
        columns.append(Column(name, None, header if name != header else None))
    return columns


def read_csv_text(
    text: str,
    name: str,
    options: IngestOptions | None = None,
    declared_types: dict[str, str] | None = None,
    source: str = "<text>",
) -> Table:
    options = options or IngestOptions()
    nulls = set(options.null_markers)
    reader = csv.reader(io.StringIO(text, newline=""), delimiter=options.delimiter, strict=True)
    header: list[str] | None = None
    rows: list[list[str | None]] = []
    width = None
    try:
        for record in reader:
            if not record:
                continue  # blank line
            if header is None and options.has_header:
                header = record
                width = len(record)
                continue
            if width is None:
                width = len(record)
            if len(record) != width:
                raise DataPrepError(
                    f"{source}: row {reader.line_num} has {len(record)} cells, expected {width}"
                )
            rows.append([None if cell in nulls else cell for cell in record])
    except csv.Error as exc:
        raise DataPrepError(f"{source}: line {reader.line_num}: {exc}") from None
    if header is not None:
        columns = _unique_names(header)
        synthetic = False
    else:
        columns = [Column(f"col{i}") for i in range(1, (width or 0) + 1)]
        synthetic = True
    if declared_types:
        by_name = {c.name: c for c in columns}
        for col, typ in declared_types.items():
            if col not in by_name:
                raise DataPrepError(f"{source}: declared type for unknown column {col!r}")
        columns = [Column(c.name, declared_types.get(c.name), c.source_name) for c in columns]
    return Table(name, columns, rows, synthetic)


def ingest_csv(
    path: str | Path,
    options: IngestOptions | dict | None = None,
    name: str | None = None,
    declared_types: dict[str, str] | None = None,
) -> Table:
    """Read a delimited file into a Table.

    Raises DataPrepError for ragged rows (with the row's line number),
    undecodable bytes and malformed quoting. OSError propagates for
    unreadable files.
    """
    path = Path(path)
    if not isinstance(options, IngestOptions):
        options = IngestOptions.from_dict(options)
    text = _decode(path.read_bytes(), options.encoding, path)
    return read_csv_text(text, name or path.stem, options, declared_types, str(path))


def write_csv(table: Table, path: str | Path, delimiter: str = ",", null: str = "") -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter, lineterminator="\n")
        writer.writerow(table.column_names)
        for row in table.rows:
            writer.writerow([null if cell is None else cell for cell in row])
