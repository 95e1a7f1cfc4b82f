"""Cell format classes, type parsing and type inference."""

from __future__ import annotations

import re
from datetime import date, datetime

# Ordered: the first matching class wins.
FORMAT_CLASSES: list[tuple[str, re.Pattern]] = [
    ("iso_date", re.compile(r"\d{4}-\d{2}-\d{2}(?:T\d{2}:\d{2}(?::\d{2}(?:\.\d+)?)?(?:Z|[+-]\d{2}:\d{2})?)?")),
    ("dotted_date", re.compile(r"\d{1,2}\.\d{1,2}\.\d{2,4}")),
    ("slashed_date", re.compile(r"\d{1,2}/\d{1,2}/\d{2,4}")),
    ("integer", re.compile(r"[+-]?\d+")),
    ("decimal_dot", re.compile(r"[+-]?(?:\d+\.\d*|\.\d+|\d+(?:\.\d*)?[eE][+-]?\d+)")),
    ("decimal_comma", re.compile(r"[+-]?\d+,\d+")),
    ("boolean", re.compile(r"(?i:true|false|yes|no)")),
]
FORMAT_ORDER = [name for name, _ in FORMAT_CLASSES] + ["other"]

INFERENCE_ORDER = ("integer", "decimal", "date", "datetime", "boolean")
INFERENCE_THRESHOLD_PERCENT = 95

_INTEGER = re.compile(r"[+-]?\d+")
_DECIMAL = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)")
_DECIMAL_COMMA = re.compile(r"[+-]?\d+,\d+")
_DATE = re.compile(r"\d{4}-\d{2}-\d{2}")
_DOTTED = re.compile(r"(\d{1,2})\.(\d{1,2})\.(\d{4})")
_DATETIME = re.compile(r"(\d{4}-\d{2}-\d{2})[T ](\d{2}:\d{2}:\d{2}(?:\.\d+)?)(Z|[+-]\d{2}:\d{2})?")
_TRUE = {"true", "1", "yes"}
_FALSE = {"false", "0", "no"}


def format_class(value: str) -> str:
    for name, pattern in FORMAT_CLASSES:
        if pattern.fullmatch(value):
            return name
    return "other"


def _iso_date(text: str) -> str | None:
    if not _DATE.fullmatch(text):
        return None
    try:
        return date.fromisoformat(text).isoformat()
    except ValueError:
        return None


def parse_as(value: str, typ: str) -> str | None:
    """Canonical lexical form of `value` under `typ`, or None if it does not parse.

    Canonical forms line up with the XSD lexical spaces used by the mapping
    stage: integers without leading '+', decimals with a dot, ISO dates,
    ISO date-times with 'T', booleans as true/false.
    """
    if typ == "string":
        return value
    if typ == "integer":
        if not _INTEGER.fullmatch(value):
            return None
        return str(int(value))
    if typ == "decimal":
        if _DECIMAL_COMMA.fullmatch(value):
            value = value.replace(",", ".")
        if not _DECIMAL.fullmatch(value):
            return None
        return value.lstrip("+")
    if typ == "date":
        iso = _iso_date(value)
        if iso is not None:
            return iso
        m = _DOTTED.fullmatch(value)
        if m:
            try:
                return date(int(m.group(3)), int(m.group(2)), int(m.group(1))).isoformat()
            except ValueError:
                return None
        return None
    if typ == "datetime":
        m = _DATETIME.fullmatch(value)
        if not m or _iso_date(m.group(1)) is None:
            return None
        text = f"{m.group(1)}T{m.group(2)}{m.group(3) or ''}"
        try:
            datetime.fromisoformat(text.replace("Z", "+00:00"))
        except ValueError:
            return None
        return text
    if typ == "boolean":
        low = value.lower()
        if low in _TRUE:
            return "true"
        if low in _FALSE:
            return "false"
        return None
    raise ValueError(f"unknown column type {typ!r}")


def parses_as(value: str, typ: str) -> bool:
    return parse_as(value, typ) is not None


def infer_type(values: list[str | None]) -> str:
    """First type (in INFERENCE_ORDER) that parses ≥ 95 % of non-null cells, else string."""
    present = [v for v in values if v is not None]
    if not present:
        return "string"
    for typ in INFERENCE_ORDER:
        ok = sum(1 for v in present if parse_as(v, typ) is not None)
        if ok * 100 >= INFERENCE_THRESHOLD_PERCENT * len(present):
            return typ
    return "string"
