"""Lexical validation and value extraction for the common XSD datatypes."""

from __future__ import annotations

import math
import re
from datetime import date, datetime, timedelta, timezone
from decimal import Decimal, InvalidOperation

from .terms import XSD, Literal

INTEGER_TYPES = {
    XSD + name: bounds
    for name, bounds in {
        "integer": (None, None),
        "long": (-(2**63), 2**63 - 1),
        "int": (-(2**31), 2**31 - 1),
        "short": (-(2**15), 2**15 - 1),
        "byte": (-128, 127),
        "nonNegativeInteger": (0, None),
        "positiveInteger": (1, None),
        "nonPositiveInteger": (None, 0),
        "negativeInteger": (None, -1),
        "unsignedLong": (0, 2**64 - 1),
        "unsignedInt": (0, 2**32 - 1),
        "unsignedShort": (0, 2**16 - 1),
        "unsignedByte": (0, 255),
    }.items()
}
DECIMAL = XSD + "decimal"
DOUBLE = XSD + "double"
FLOAT = XSD + "float"
BOOLEAN = XSD + "boolean"
DATE = XSD + "date"
DATETIME = XSD + "dateTime"
STRING = XSD + "string"
NUMERIC_TYPES = frozenset(INTEGER_TYPES) | {DECIMAL, DOUBLE, FLOAT}

_INT = re.compile(r"[+-]?[0-9]+\Z")
_DEC = re.compile(r"[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)\Z")
_DBL = re.compile(r"(?:[+-]?(?:[0-9]+(?:\.[0-9]*)?|\.[0-9]+)(?:[eE][+-]?[0-9]+)?|[+-]?INF|NaN)\Z")
_TZ = r"(Z|[+-](?:(?:0[0-9]|1[0-3]):[0-5][0-9]|14:00))?"
_DATE = re.compile(r"(-?[0-9]{4,})-([0-9]{2})-([0-9]{2})" + _TZ + r"\Z")
_DATETIME = re.compile(
    r"(-?[0-9]{4,})-([0-9]{2})-([0-9]{2})T([0-9]{2}):([0-9]{2}):([0-9]{2})(\.[0-9]+)?" + _TZ + r"\Z"
)


def _tz(text: str | None):
    if not text:
        return None
    if text == "Z":
        return timezone.utc
    sign = -1 if text[0] == "-" else 1
    hours, minutes = int(text[1:3]), int(text[4:6])
    return timezone(sign * timedelta(hours=hours, minutes=minutes))


def parse_date(lexical: str) -> date | None:
    m = _DATE.match(lexical)
    if m is None:
        return None
    try:
        return date(int(m.group(1)), int(m.group(2)), int(m.group(3)))
    except ValueError:
        return None


def parse_datetime(lexical: str) -> datetime | None:
    m = _DATETIME.match(lexical)
    if m is None:
        return None
    year, month, day, hour, minute, second = (int(m.group(i)) for i in range(1, 7))
    frac = m.group(7)
    micro = int((frac[1:] + "000000")[:6]) if frac else 0
    extra = timedelta(0)
    if hour == 24 and minute == 0 and second == 0 and micro == 0:
        hour, extra = 0, timedelta(days=1)
    try:
        return datetime(year, month, day, hour, minute, second, micro, tzinfo=_tz(m.group(8))) + extra
    except (ValueError, OverflowError):
        return None


def parse_value(lexical: str, datatype: str):
    """Python value of a lexical form under `datatype`.

    Returns None if the lexical form is invalid for a known datatype. Unknown
    datatypes yield the lexical form itself.
    """
    if datatype in INTEGER_TYPES:
        if not _INT.match(lexical):
            return None
        value = int(lexical)
        lo, hi = INTEGER_TYPES[datatype]
        if (lo is not None and value < lo) or (hi is not None and value > hi):
            return None
        return value
    if datatype == DECIMAL:
        if not _DEC.match(lexical):
            return None
        try:
            return Decimal(lexical)
        except InvalidOperation:
            return None
    if datatype in (DOUBLE, FLOAT):
        if not _DBL.match(lexical):
            return None
        return float(lexical.replace("INF", "inf"))
    if datatype == BOOLEAN:
        if lexical in ("true", "1"):
            return True
        if lexical in ("false", "0"):
            return False
        return None
    if datatype == DATE:
        return parse_date(lexical)
    if datatype == DATETIME:
        return parse_datetime(lexical)
    return lexical


def is_valid(lexical: str, datatype: str) -> bool:
    return parse_value(lexical, datatype) is not None


def is_known(datatype: str) -> bool:
    return datatype in NUMERIC_TYPES or datatype in (BOOLEAN, DATE, DATETIME, STRING)


def numeric_value(term) -> float | int | None:
    """Numeric value of a literal as int (integer family) or float, else None."""
    if type(term) is not Literal or term.datatype not in NUMERIC_TYPES:
        return None
    value = parse_value(term.lexical, term.datatype)
    if value is None:
        return None
    if isinstance(value, Decimal):
        return float(value)
    return value


def canonical_number(value: float | int) -> Literal:
    if isinstance(value, int) and not isinstance(value, bool):
        return Literal(str(value), XSD + "integer")
    if math.isnan(value):
        return Literal("NaN", DOUBLE)
    if math.isinf(value):
        return Literal("INF" if value > 0 else "-INF", DOUBLE)
    return Literal(repr(float(value)), DOUBLE)
