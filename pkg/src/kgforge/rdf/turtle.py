"""Turtle parser.

Covers the full Turtle terminal set, prefix/base directives (both the
`@prefix` and SPARQL-style forms), predicate-object lists, object lists,
collections and anonymous blank nodes. Turtle-star is not supported.
"""

from __future__ import annotations

import re

from .errors import RDFSyntaxError, position
from .graph import Graph
from .iri import resolve
from .terms import (
    IRI,
    RDF,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    BlankNode,
    Literal,
    is_absolute_iri,
)

MAX_NESTING = 100

_BASE_CHARS = (
    "A-Za-z\u00C0-\u00D6\u00D8-\u00F6\u00F8-\u02FF\u0370-\u037D\u037F-\u1FFF\u200C-\u200D"
    "\u2070-\u218F\u2C00-\u2FEF\u3001-\uD7FF\uF900-\uFDCF\uFDF0-\uFFFD\U00010000-\U000EFFFF"
)
_U_CHARS = _BASE_CHARS + "_"
_CHARS = _U_CHARS + r"\-0-9\u00B7\u0300-\u036F\u203F-\u2040"
_PLX = r"%[0-9A-Fa-f]{2}|\\[_~.\-!$&'()*+,;=/?#@%]"
PN_PREFIX = rf"[{_BASE_CHARS}](?:[{_CHARS}.]*[{_CHARS}])?"
PN_LOCAL = rf"(?:[{_U_CHARS}:0-9]|{_PLX})(?:(?:[{_CHARS}.:]|{_PLX})*(?:[{_CHARS}:]|{_PLX}))?"
IRIREF = r'<(?:[^\x00-\x20<>"{}|^`\\]|\\u[0-9A-Fa-f]{4}|\\U[0-9A-Fa-f]{8})*>'
BLANK_LABEL = rf"_:[{_U_CHARS}0-9](?:[{_CHARS}.]*[{_CHARS}])?"

_TOKEN = re.compile(
    "|".join(
        [
            r"(?P<WS>[ \t\r\n]+|#[^\r\n]*)",
            rf"(?P<IRI>{IRIREF})",
            r'(?P<LSTR2>"""(?:(?:"|"")?(?:[^"\\]|\\[\s\S]))*""")',
            r"(?P<LSTR1>'''(?:(?:'|'')?(?:[^'\\]|\\[\s\S]))*''')",
            r'(?P<STR2>"(?:[^"\\\r\n]|\\[^\r\n])*")',
            r"(?P<STR1>'(?:[^'\\\r\n]|\\[^\r\n])*')",
            r"(?P<AT>@[A-Za-z]+(?:-[A-Za-z0-9]+)*)",
            r"(?P<DOUBLE>[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.[0-9]+[eE][+-]?[0-9]+|[0-9]+[eE][+-]?[0-9]+))",
            r"(?P<DECIMAL>[+-]?[0-9]*\.[0-9]+)",
            r"(?P<INTEGER>[+-]?[0-9]+)",
            rf"(?P<BNODE>{BLANK_LABEL})",
            rf"(?P<PNAME>(?:{PN_PREFIX})?:(?:{PN_LOCAL})?)",
            r"(?P<WORD>[A-Za-z]+)",
            r"(?P<PUNCT>\^\^|[.;,\[\]()])",
            r"(?P<ERR>[\s\S])",
        ]
    )
)

_ECHAR = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}
_ESCAPE = re.compile(r"\\(?:u([0-9A-Fa-f]{4})|U([0-9A-Fa-f]{8})|([\s\S]))")
_LOCAL_ESC = re.compile(r"\\([_~.\-!$&'()*+,;=/?#@%])")


def _unescape_string(raw: str) -> str:
    if "\\" not in raw:
        return raw

    def sub(m: re.Match) -> str:
        if m.group(3) is not None:
            ch = _ECHAR.get(m.group(3))
            if ch is None:
                raise ValueError(f"invalid escape sequence \\{m.group(3)}")
            return ch
        return _codepoint(m.group(1) or m.group(2))

    return _ESCAPE.sub(sub, raw)


def _codepoint(hexdigits: str) -> str:
    cp = int(hexdigits, 16)
    if cp > 0x10FFFF or 0xD800 <= cp <= 0xDFFF:
        raise ValueError(f"invalid code point U+{hexdigits}")
    return chr(cp)


def unescape_iri(raw: str) -> str:
    if "\\" not in raw:
        return raw

    def sub(m: re.Match) -> str:
        if m.group(3) is not None:
            raise ValueError(f"invalid escape sequence \\{m.group(3)} in IRI")
        return _codepoint(m.group(1) or m.group(2))

    return _ESCAPE.sub(sub, raw)


def tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    for m in _TOKEN.finditer(text):
        kind = m.lastgroup
        if kind == "WS":
            continue
        if kind == "ERR":
            ch = m.group()
            line, col = position(text, m.start())
            if ch in "\"'":
                raise RDFSyntaxError("unterminated string literal", line, col)
            if ch == "<":
                raise RDFSyntaxError("malformed IRI reference", line, col)
            raise RDFSyntaxError(f"unexpected character {ch!r}", line, col)
        tokens.append((kind, m.group(), m.start()))
    return tokens


_EOF = ("EOF", "", -1)


class TurtleParser:
    """Single-use parser for one Turtle document."""

    def __init__(self, text: str, base: str | None = None, graph: Graph | None = None):
        self.text = text
        self.base = base
        self.graph = graph if graph is not None else Graph()
        self.prefixes: dict[str, str] = {}
        self.bnodes: dict[str, BlankNode] = {}
        self.tokens: list = []
        self.i = 0
        self.depth = 0

    # -- token helpers -----------------------------------------------------

    def error(self, message: str, offset: int | None = None) -> RDFSyntaxError:
        if offset is None:
            tok = self.peek()
            offset = tok[2] if tok[2] >= 0 else len(self.text)
        line, col = position(self.text, offset)
        return RDFSyntaxError(message, line, col)

    def error_after_previous(self, message: str) -> RDFSyntaxError:
        """Error located just past the previous token (for missing terminators)."""
        if self.i == 0:
            return self.error(message)
        kind, value, start = self.tokens[self.i - 1]
        return self.error(message, start + len(value))

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else _EOF

    def next(self):
        tok = self.peek()
        self.i += 1
        return tok

    def is_punct(self, value: str) -> bool:
        tok = self.peek()
        return tok[0] == "PUNCT" and tok[1] == value

    def expect_punct(self, value: str, what: str):
        if not self.is_punct(value):
            tok = self.peek()
            found = "end of input" if tok is _EOF else repr(tok[1])
            raise self.error_after_previous(f"expected {what} but found {found}")
        self.i += 1

    # -- document ------------------------------------------------------------

    def parse(self) -> Graph:
        self.tokens = tokenize(self.text)
        while self.i < len(self.tokens):
            self.statement()
        return self.graph

    def statement(self):
        kind, value, start = self.peek()
        if kind == "AT":
            if value == "@prefix":
                self.i += 1
                self.prefix_decl()
                self.expect_punct(".", "'.' after @prefix directive")
                return
            if value == "@base":
                self.i += 1
                self.base_decl()
                self.expect_punct(".", "'.' after @base directive")
                return
            raise self.error(f"unknown directive {value}")
        if kind == "WORD":
            upper = value.upper()
            if upper == "PREFIX":
                self.i += 1
                self.prefix_decl()
                return
            if upper == "BASE":
                self.i += 1
                self.base_decl()
                return
        self.triples()
        self.expect_punct(".", "'.' to end the statement")

    def prefix_decl(self):
        kind, value, start = self.next()
        if kind != "PNAME" or not value.endswith(":") or value.count(":") != 1:
            self.i -= 1
            raise self.error("expected a prefix name like 'ex:'")
        kind, iri_tok, istart = self.next()
        if kind != "IRI":
            self.i -= 1
            raise self.error("expected an IRI reference after prefix name")
        self.prefixes[value[:-1]] = self.resolve_iri(iri_tok, istart)

    def base_decl(self):
        kind, iri_tok, istart = self.next()
        if kind != "IRI":
            self.i -= 1
            raise self.error("expected an IRI reference after base directive")
        self.base = self.resolve_iri(iri_tok, istart)

    # -- terms -----------------------------------------------------------------

    def resolve_iri(self, token: str, offset: int) -> str:
        try:
            value = unescape_iri(token[1:-1])
        except ValueError as exc:
            raise self.error(str(exc), offset) from None
        if is_absolute_iri(value):
            return value
        if self.base is None:
            raise self.error(f"relative IRI <{value}> without a base IRI", offset)
        return resolve(self.base, value)

    def pname(self, token: str, offset: int) -> IRI:
        prefix, _, local = token.partition(":")
        ns = self.prefixes.get(prefix)
        if ns is None:
            raise self.error(f"undefined prefix '{prefix}:'", offset)
        if "\\" in local:
            local = _LOCAL_ESC.sub(r"\1", local)
        try:
            return IRI(ns + local)
        except ValueError as exc:
            raise self.error(str(exc), offset) from None

    def iri(self) -> IRI:
        kind, value, start = self.next()
        if kind == "IRI":
            return IRI(self.resolve_iri(value, start))
        if kind == "PNAME":
            return self.pname(value, start)
        self.i -= 1
        raise self.error("expected an IRI")

    def blank(self, label: str) -> BlankNode:
        node = self.bnodes.get(label)
        if node is None:
            node = self.bnodes[label] = BlankNode()
        return node

    def enter(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise self.error(f"nesting deeper than {MAX_NESTING} levels")

    # -- triples ---------------------------------------------------------------

    def triples(self):
        kind, value, start = self.peek()
        if kind == "PUNCT" and value == "[":
            subject = self.bracket()
            if isinstance(subject, tuple):
                # `[ ... ]` with a property list may stand alone
                subject = subject[0]
                if self.is_punct("."):
                    return
            self.predicate_object_list(subject)
            return
        if kind == "PUNCT" and value == "(":
            subject = self.collection()
        elif kind == "IRI":
            self.i += 1
            subject = IRI(self.resolve_iri(value, start))
        elif kind == "PNAME":
            self.i += 1
            subject = self.pname(value, start)
        elif kind == "BNODE":
            self.i += 1
            subject = self.blank(value[2:])
        elif kind == "EOF":
            raise self.error("unexpected end of input")
        else:
            raise self.error(f"unexpected {value!r} in subject position")
        self.predicate_object_list(subject)

    def bracket(self):
        """Parse `[]` or `[ predicateObjectList ]`.

        Returns the node, wrapped in a 1-tuple when a property list was present.
        """
        self.i += 1  # '['
        node = BlankNode()
        if self.is_punct("]"):
            self.i += 1
            return node
        self.enter()
        self.predicate_object_list(node)
        self.expect_punct("]", "']' to close the blank node property list")
        self.depth -= 1
        return (node,)

    def predicate_object_list(self, subject):
        self.verb_object_list(subject)
        while self.is_punct(";"):
            while self.is_punct(";"):
                self.i += 1
            kind, value, _ = self.peek()
            if kind == "PUNCT" and value in ".]":
                return
            if kind == "EOF":
                return
            self.verb_object_list(subject)

    def verb_object_list(self, subject):
        kind, value, start = self.peek()
        if kind == "WORD" and value == "a":
            self.i += 1
            predicate = RDF_TYPE
        elif kind in ("IRI", "PNAME"):
            predicate = self.iri()
        elif kind == "EOF":
            raise self.error_after_previous("expected a predicate but found end of input")
        else:
            raise self.error(f"expected a predicate but found {value!r}")
        add = self.graph.add
        add((subject, predicate, self.object()))
        while self.is_punct(","):
            self.i += 1
            add((subject, predicate, self.object()))

    def object(self):
        kind, value, start = self.next()
        if kind == "IRI":
            return IRI(self.resolve_iri(value, start))
        if kind == "PNAME":
            return self.pname(value, start)
        if kind == "BNODE":
            return self.blank(value[2:])
        if kind in ("STR2", "STR1", "LSTR2", "LSTR1"):
            return self.literal(kind, value, start)
        if kind == "INTEGER":
            return Literal(value, XSD_INTEGER)
        if kind == "DECIMAL":
            return Literal(value, XSD_DECIMAL)
        if kind == "DOUBLE":
            return Literal(value, XSD_DOUBLE)
        if kind == "WORD" and value in ("true", "false"):
            return Literal(value, XSD_BOOLEAN)
        if kind == "PUNCT" and value == "[":
            self.i -= 1
            node = self.bracket()
            return node[0] if isinstance(node, tuple) else node
        if kind == "PUNCT" and value == "(":
            self.i -= 1
            return self.collection()
        self.i -= 1
        if kind == "EOF":
            raise self.error_after_previous("expected an object but found end of input")
        raise self.error(f"expected an object but found {value!r}")

    def literal(self, kind: str, value: str, start: int) -> Literal:
        raw = value[3:-3] if kind.startswith("L") else value[1:-1]
        try:
            lexical = _unescape_string(raw)
        except ValueError as exc:
            raise self.error(str(exc), start) from None
        nkind, nvalue, nstart = self.peek()
        if nkind == "AT":
            self.i += 1
            return Literal(lexical, language=nvalue[1:])
        if nkind == "PUNCT" and nvalue == "^^":
            self.i += 1
            datatype = self.iri()
            try:
                return Literal(lexical, datatype.value)
            except ValueError as exc:
                raise self.error(str(exc), nstart) from None
        return Literal(lexical)

    def collection(self):
        self.i += 1  # '('
        self.enter()
        items = []
        while not self.is_punct(")"):
            if self.peek() is _EOF:
                raise self.error_after_previous("expected ')' to close the collection")
            items.append(self.object())
        self.i += 1
        self.depth -= 1
        if not items:
            return IRI(RDF + "nil")
        first, rest, nil = IRI(RDF + "first"), IRI(RDF + "rest"), IRI(RDF + "nil")
        head = node = BlankNode()
        for index, item in enumerate(items):
            self.graph.add((node, first, item))
            nxt = BlankNode() if index + 1 < len(items) else nil
            self.graph.add((node, rest, nxt))
            node = nxt
        return head


def parse_turtle(text: str, base: str | None = None, graph: Graph | None = None) -> Graph:
    """Parse a Turtle document into a Graph (or into `graph`, if given)."""
    parser = TurtleParser(text, base, graph)
    try:
        return parser.parse()
    except RecursionError:
        raise parser.error("nesting too deep to parse") from None

