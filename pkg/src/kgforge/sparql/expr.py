"""FILTER expression evaluation with SPARQL error semantics.

Values are RDF terms or Python bools. Type errors raise ExprError; a FILTER
whose expression errors rejects the row.
"""

from __future__ import annotations

import math
import re

from ..rdf import xsd
from ..rdf.terms import IRI, RDF_LANGSTRING, XSD_BOOLEAN, XSD_INTEGER, XSD_STRING, BlankNode, Literal
from .ast import Call, Const, Op, Var

TRUE = Literal("true", XSD_BOOLEAN)
FALSE = Literal("false", XSD_BOOLEAN)


class ExprError(Exception):
    pass


def as_term(value):
    if value is True:
        return TRUE
    if value is False:
        return FALSE
    return value


def evaluate_expr(expr, row: dict):
    if type(expr) is Var:
        value = row.get(expr.name)
        if value is None:
            raise ExprError(f"unbound variable ?{expr.name}")
        return value
    if type(expr) is Const:
        return expr.term
    if type(expr) is Op:
        return _OPS[expr.op](expr.args, row)
    if type(expr) is Call:
        return _call(expr, row)
    raise TypeError(f"not an expression: {expr!r}")


def ebv(value) -> bool:
    """Effective boolean value."""
    if value is True or value is False:
        return value
    if type(value) is Literal:
        dt = value.datatype
        if dt == XSD_BOOLEAN:
            return value.lexical in ("true", "1")
        if dt in xsd.NUMERIC_TYPES:
            n = xsd.numeric_value(value)
            # an invalid numeric lexical form has EBV false
            return n is not None and n == n and n != 0
        if dt == XSD_STRING or dt == RDF_LANGSTRING:
            return value.lexical != ""
    raise ExprError("no effective boolean value")


def filter_passes(expr, row: dict) -> bool:
    try:
        return ebv(evaluate_expr(expr, row))
    except ExprError:
        return False


# -- operators -------------------------------------------------------------------


def _and(args, row):
    error = False
    for arg in args:
        try:
            if not ebv(evaluate_expr(arg, row)):
                return False
        except ExprError:
            error = True
    if error:
        raise ExprError("error in &&")
    return True


def _or(args, row):
    error = False
    for arg in args:
        try:
            if ebv(evaluate_expr(arg, row)):
                return True
        except ExprError:
            error = True
    if error:
        raise ExprError("error in ||")
    return False


def _not(args, row):
    return not ebv(evaluate_expr(args[0], row))


def terms_equal(a, b) -> bool:
    a, b = as_term(a), as_term(b)
    x, y = xsd.numeric_value(a), xsd.numeric_value(b)
    if x is not None and y is not None:
        if isinstance(x, int) and isinstance(y, int):
            return x == y
        return float(x) == float(y)
    return a == b


def _ordered_values(a, b):
    """Comparable Python values for `<`-style operators, or ExprError."""
    a, b = as_term(a), as_term(b)
    x, y = xsd.numeric_value(a), xsd.numeric_value(b)
    if x is not None and y is not None:
        if isinstance(x, int) and isinstance(y, int):
            return x, y
        return float(x), float(y)
    if type(a) is Literal and type(b) is Literal and a.datatype == b.datatype:
        if a.datatype == XSD_STRING:
            return a.lexical, b.lexical
        if a.datatype in (xsd.DATE, xsd.DATETIME):
            x, y = xsd.parse_value(a.lexical, a.datatype), xsd.parse_value(b.lexical, b.datatype)
            if x is None or y is None:
                raise ExprError("invalid date lexical form")
            if a.datatype == xsd.DATETIME and (x.tzinfo is None) != (y.tzinfo is None):
                raise ExprError("cannot compare dateTimes with and without timezone")
            return x, y
    raise ExprError("values are not comparable")


def _comparison(op):
    def run(args, row):
        left = evaluate_expr(args[0], row)
        right = evaluate_expr(args[1], row)
        if op == "=":
            return terms_equal(left, right)
        if op == "!=":
            return not terms_equal(left, right)
        x, y = _ordered_values(left, right)
        if op == "<":
            return x < y
        if op == ">":
            return x > y
        if op == "<=":
            return x <= y
        return x >= y

    return run


def _in(args, row):
    left = evaluate_expr(args[0], row)
    error = False
    for item in args[1:]:
        try:
            if terms_equal(left, evaluate_expr(item, row)):
                return True
        except ExprError:
            error = True
    if error:
        raise ExprError("error in IN")
    return False


def _notin(args, row):
    return not _in(args, row)


_OPS = {
    "&&": _and,
    "||": _or,
    "!": _not,
    "in": _in,
    "notin": _notin,
    **{op: _comparison(op) for op in ("=", "!=", "<", ">", "<=", ">=")},
}


# -- built-in functions ---------------------------------------------------------------


def _string(value) -> Literal:
    value = as_term(value)
    if type(value) is Literal and value.datatype in (XSD_STRING, RDF_LANGSTRING):
        return value
    raise ExprError("expected a string literal")


def _compatible_pair(a, b) -> tuple[str, str]:
    a, b = _string(a), _string(b)
    if b.language is not None and a.language != b.language:
        raise ExprError("incompatible language tags")
    return a.lexical, b.lexical


_REGEX_FLAGS = {"i": re.IGNORECASE, "s": re.DOTALL, "m": re.MULTILINE, "x": re.VERBOSE}


def _regex(text, pattern, flags=None):
    text = _string(text).lexical
    pattern = _string(pattern).lexical
    bits = 0
    if flags is not None:
        for ch in _string(flags).lexical:
            if ch not in _REGEX_FLAGS:
                raise ExprError(f"unknown regex flag {ch!r}")
            bits |= _REGEX_FLAGS[ch]
    try:
        return re.search(pattern, text, bits) is not None
    except re.error as exc:
        raise ExprError(f"invalid regular expression: {exc}") from None


def _str(value):
    value = as_term(value)
    if type(value) is IRI:
        return Literal(value.value)
    if type(value) is Literal:
        return Literal(value.lexical)
    raise ExprError("STR of a blank node")


def _lang(value):
    value = as_term(value)
    if type(value) is not Literal:
        raise ExprError("LANG of a non-literal")
    return Literal(value.language or "")


def _datatype(value):
    value = as_term(value)
    if type(value) is not Literal:
        raise ExprError("DATATYPE of a non-literal")
    return IRI(value.datatype)


def _case(fn):
    def run(value):
        s = _string(value)
        return Literal(fn(s.lexical), language=s.language) if s.language else Literal(fn(s.lexical))

    return run


def _langmatches(tag, rng):
    tag, rng = _string(tag).lexical.lower(), _string(rng).lexical.lower()
    if rng == "*":
        return tag != ""
    return tag == rng or tag.startswith(rng + "-")


_FUNCTIONS = {
    "REGEX": _regex,
    "STR": _str,
    "LANG": _lang,
    "DATATYPE": _datatype,
    "ISIRI": lambda v: type(as_term(v)) is IRI,
    "ISURI": lambda v: type(as_term(v)) is IRI,
    "ISBLANK": lambda v: type(as_term(v)) is BlankNode,
    "ISLITERAL": lambda v: type(as_term(v)) is Literal,
    "ISNUMERIC": lambda v: xsd.numeric_value(as_term(v)) is not None,
    "CONTAINS": lambda a, b: (lambda x, y: y in x)(*_compatible_pair(a, b)),
    "STRSTARTS": lambda a, b: (lambda x, y: x.startswith(y))(*_compatible_pair(a, b)),
    "STRENDS": lambda a, b: (lambda x, y: x.endswith(y))(*_compatible_pair(a, b)),
    "LCASE": _case(str.lower),
    "UCASE": _case(str.upper),
    "STRLEN": lambda v: Literal(str(len(_string(v).lexical)), XSD_INTEGER),
    "SAMETERM": lambda a, b: as_term(a) == as_term(b),
    "LANGMATCHES": _langmatches,
}


def _call(expr: Call, row: dict):
    if expr.name == "BOUND":
        return row.get(expr.args[0].name) is not None
    args = [evaluate_expr(arg, row) for arg in expr.args]
    return _FUNCTIONS[expr.name](*args)


# -- ordering -------------------------------------------------------------------------


def order_key(term) -> tuple:
    """Total order used by ORDER BY: unbound < blank < IRI < literal.

    Numeric literals sort by value before all other literals, which sort by
    lexical form, datatype and language.
    """
    if term is None:
        return (0,)
    term = as_term(term)
    if type(term) is BlankNode:
        return (1, term.label)
    if type(term) is IRI:
        return (2, term.value)
    n = xsd.numeric_value(term)
    if n is not None and not (isinstance(n, float) and math.isnan(n)):
        return (3, 0, float(n), term.lexical, term.datatype)
    return (3, 1, term.lexical, term.datatype, term.language or "")
