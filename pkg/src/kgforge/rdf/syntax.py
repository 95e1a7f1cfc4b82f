"""Syntax-level validation of RDF files (quality level 1)."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

from .errors import RDFSyntaxError
from .graph import Dataset, Graph
from .ntriples import parse_nquads, parse_ntriples
from .turtle import parse_turtle

_EXTENSIONS = {".ttl": "turtle", ".nt": "ntriples", ".nq": "nquads"}


@dataclass
class SyntaxError_:
    line: int
    column: int
    message: str


@dataclass
class SyntaxReport:
    ok: bool
    errors: list[SyntaxError_] = field(default_factory=list)
    triple_count: int = 0
    path: str | None = None
    format: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def guess_format(path: str | Path) -> str:
    fmt = _EXTENSIONS.get(Path(path).suffix.lower())
    if fmt is None:
        raise ValueError(f"cannot infer RDF format from file name {str(path)!r}")
    return fmt


def parse(text: str, format: str, base: str | None = None) -> Graph | Dataset:
    if format == "turtle":
        return parse_turtle(text, base)
    if format == "ntriples":
        return parse_ntriples(text)
    if format == "nquads":
        return parse_nquads(text)
    raise ValueError(f"unknown RDF format {format!r}")


def parse_file(path: str | Path, format: str | None = None, base: str | None = None) -> Graph | Dataset:
    path = Path(path)
    format = format or guess_format(path)
    if base is None and format == "turtle":
        base = path.resolve().as_uri()
    return parse(path.read_text(encoding="utf-8"), format, base)


def validate_syntax(path: str | Path, format: str | None = None) -> SyntaxReport:
    """Parse a file and report syntax errors instead of raising.

    Only I/O failures raise (OSError); undecodable bytes are reported as a
    syntax error located at the offending line.
    """
    path = Path(path)
    format = format or guess_format(path)
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        line = raw.count(b"\n", 0, exc.start) + 1
        column = exc.start - (raw.rfind(b"\n", 0, exc.start) + 1) + 1
        return SyntaxReport(False, [SyntaxError_(line, column, "invalid UTF-8 byte sequence")], 0, str(path), format)
    try:
        result = parse(text, format, path.resolve().as_uri())
    except RDFSyntaxError as exc:
        return SyntaxReport(False, [SyntaxError_(exc.line, exc.column, exc.message)], 0, str(path), format)
    except RecursionError:
        return SyntaxReport(False, [SyntaxError_(1, 1, "document nesting too deep")], 0, str(path), format)
    return SyntaxReport(True, [], len(result), str(path), format)
