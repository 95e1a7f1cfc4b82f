"""RDF terms: IRIs, blank nodes, literals, and query/rule variables.

Terms are immutable and hashable. Equality is term equality: two literals are
equal only if lexical form, datatype and language tag all match.
"""

from __future__ import annotations

import itertools
import re

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
RDFS = "http://www.w3.org/2000/01/rdf-schema#"
OWL = "http://www.w3.org/2002/07/owl#"
XSD = "http://www.w3.org/2001/XMLSchema#"
SH = "http://www.w3.org/ns/shacl#"

XSD_STRING = XSD + "string"
XSD_INTEGER = XSD + "integer"
XSD_DECIMAL = XSD + "decimal"
XSD_DOUBLE = XSD + "double"
XSD_BOOLEAN = XSD + "boolean"
RDF_LANGSTRING = RDF + "langString"

_ABSOLUTE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
_LANGTAG = re.compile(r"^[A-Za-z]+(?:-[A-Za-z0-9]+)*$")

_fresh = itertools.count()


def is_absolute_iri(value: str) -> bool:
    return bool(_ABSOLUTE.match(value))


class Term:
    __slots__ = ()

    def n3(self) -> str:
        raise NotImplementedError


class IRI(Term):
    __slots__ = ("value", "_hash")

    def __init__(self, value: str):
        if not _ABSOLUTE.match(value):
            raise ValueError(f"IRI is not absolute: {value!r}")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "_hash", hash(("i", value)))

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return type(other) is IRI and other.value == self.value

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"IRI({self.value!r})"

    def __reduce__(self):
        return (IRI, (self.value,))

    def n3(self) -> str:
        return "<" + escape_iri(self.value) + ">"


class BlankNode(Term):
    """A blank node. Without a label a fresh, process-unique one is minted."""

    __slots__ = ("label", "_hash")

    def __init__(self, label: str | None = None):
        if label is None:
            label = f"g{next(_fresh)}"
        elif not label:
            raise ValueError("blank node label must be non-empty")
        object.__setattr__(self, "label", label)
        object.__setattr__(self, "_hash", hash(("b", label)))

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return type(other) is BlankNode and other.label == self.label

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"BlankNode({self.label!r})"

    def __reduce__(self):
        return (BlankNode, (self.label,))

    def n3(self) -> str:
        return "_:" + self.label


class Literal(Term):
    __slots__ = ("lexical", "datatype", "language", "_hash")

    def __init__(self, lexical: str, datatype: str | None = None, language: str | None = None):
        if language is not None:
            if not _LANGTAG.match(language):
                raise ValueError(f"malformed language tag: {language!r}")
            if datatype not in (None, RDF_LANGSTRING):
                raise ValueError("a literal with a language tag must have datatype rdf:langString")
            language = language.lower()
            datatype = RDF_LANGSTRING
        else:
            if datatype is None:
                datatype = XSD_STRING
            elif datatype == RDF_LANGSTRING:
                raise ValueError("rdf:langString literal requires a language tag")
            elif not _ABSOLUTE.match(datatype):
                raise ValueError(f"datatype IRI is not absolute: {datatype!r}")
        object.__setattr__(self, "lexical", lexical)
        object.__setattr__(self, "datatype", datatype)
        object.__setattr__(self, "language", language)
        object.__setattr__(self, "_hash", hash(("l", lexical, datatype, language)))

    def __setattr__(self, name, value):
        raise AttributeError("terms are immutable")

    def __eq__(self, other):
        return (
            type(other) is Literal
            and other.lexical == self.lexical
            and other.datatype == self.datatype
            and other.language == self.language
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.language:
            return f"Literal({self.lexical!r}, language={self.language!r})"
        return f"Literal({self.lexical!r}, {self.datatype!r})"

    def __reduce__(self):
        if self.language:
            return (Literal, (self.lexical, None, self.language))
        return (Literal, (self.lexical, self.datatype))

    def n3(self) -> str:
        quoted = '"' + escape_string(self.lexical) + '"'
        if self.language:
            return quoted + "@" + self.language
        if self.datatype == XSD_STRING:
            return quoted
        return quoted + "^^<" + escape_iri(self.datatype) + ">"


class Variable:
    """A named variable in a query pattern or rule body (not an RDF term)."""

    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)

    def __setattr__(self, name, value):
        raise AttributeError("variables are immutable")

    def __eq__(self, other):
        return type(other) is Variable and other.name == self.name

    def __hash__(self):
        return hash(("v", self.name))

    def __repr__(self):
        return f"Variable({self.name!r})"

    def n3(self) -> str:
        return "?" + self.name


_STRING_ESCAPES = {'"': '\\"', "\\": "\\\\", "\n": "\\n", "\r": "\\r", "\t": "\\t", "\b": "\\b", "\f": "\\f"}
_NEEDS_STRING_ESCAPE = re.compile(r'["\\\x00-\x1f\x7f]')
_NEEDS_IRI_ESCAPE = re.compile(r'[\x00-\x20<>"{}|^`\\]')


def _escape_char(match: re.Match) -> str:
    ch = match.group()
    return _STRING_ESCAPES.get(ch) or f"\\u{ord(ch):04X}"


def escape_string(value: str) -> str:
    return _NEEDS_STRING_ESCAPE.sub(_escape_char, value)


def escape_iri(value: str) -> str:
    return _NEEDS_IRI_ESCAPE.sub(lambda m: f"\\u{ord(m.group()):04X}", value)


def term_sort_key(term: Term) -> tuple:
    """Deterministic total order over terms for stable report output."""
    if type(term) is IRI:
        return (1, term.value, "", "")
    if type(term) is BlankNode:
        return (0, term.label, "", "")
    return (2, term.lexical, term.datatype, term.language or "")


RDF_TYPE = IRI(RDF + "type")
