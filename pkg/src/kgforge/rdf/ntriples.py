"""Line-oriented parser for N-Triples and N-Quads."""

from __future__ import annotations

import re

from .errors import RDFSyntaxError
from .graph import Dataset, Graph
from .terms import IRI, BlankNode, Literal, is_absolute_iri
from .turtle import BLANK_LABEL, IRIREF, _unescape_string, unescape_iri

_WS = re.compile(r"[ \t]*")
_ANY = rf'(?:{IRIREF}|{BLANK_LABEL}|"(?:[^"\\\r\n]|\\[^\r\n])*"(?:\^\^{IRIREF}|@[A-Za-z]+(?:-[A-Za-z0-9]+)*)?)'
_STATEMENT = re.compile(rf"[ \t]*({_ANY})[ \t]*({_ANY})[ \t]*({_ANY})(?:[ \t]*({_ANY}))?[ \t]*\.[ \t]*(?:#.*)?\Z")
_TERM = re.compile(
    rf"(?P<iri>{IRIREF})"
    rf"|(?P<bnode>{BLANK_LABEL})"
    r'|"(?P<lex>(?:[^"\\\r\n]|\\[^\r\n])*)"(?:\^\^(?P<dt>' + IRIREF + r")|@(?P<lang>[A-Za-z]+(?:-[A-Za-z0-9]+)*))?"
)


class _LineParser:
    def __init__(self, quads: bool):
        self.quads = quads
        self.bnodes: dict[str, BlankNode] = {}
        self.cache: dict[str, object] = {}

    def fast(self, line: str):
        """Whole-line match for well-formed statements; None defers to `line`."""
        m = _STATEMENT.match(line)
        if m is None:
            return None
        cache = self.cache
        out = []
        for raw in m.groups():
            if raw is None:
                out.append(None)
                continue
            term = cache.get(raw)
            if term is None:
                try:
                    term = self.term(raw, 0, 0)[0]
                except RDFSyntaxError:
                    return None
                cache[raw] = term
            out.append(term)
        s, p, o, g = out
        if type(s) is Literal or type(p) is not IRI:
            return None
        if g is not None and (not self.quads or type(g) is not IRI):
            return None
        return s, p, o, g

    def fail(self, message: str, lineno: int, pos: int):
        raise RDFSyntaxError(message, lineno, pos + 1)

    def term(self, line: str, pos: int, lineno: int):
        m = _TERM.match(line, pos)
        if m is None:
            if pos >= len(line) or line[pos] == "#":
                self.fail("unexpected end of line, expected an RDF term", lineno, pos)
            self.fail(f"malformed RDF term starting with {line[pos]!r}", lineno, pos)
        if m.group("iri") is not None:
            return self.iri(m.group("iri")[1:-1], lineno, pos), m.end()
        if m.group("bnode") is not None:
            label = m.group("bnode")[2:]
            node = self.bnodes.get(label)
            if node is None:
                node = self.bnodes[label] = BlankNode()
            return node, m.end()
        try:
            lexical = _unescape_string(m.group("lex"))
            dt = m.group("dt")
            if dt is not None:
                return Literal(lexical, self.iri(dt[1:-1], lineno, pos).value), m.end()
            return Literal(lexical, language=m.group("lang")), m.end()
        except ValueError as exc:
            self.fail(str(exc), lineno, pos)

    def iri(self, raw: str, lineno: int, pos: int) -> IRI:
        try:
            value = unescape_iri(raw)
        except ValueError as exc:
            self.fail(str(exc), lineno, pos)
        if not is_absolute_iri(value):
            self.fail(f"relative IRI <{value}> not allowed", lineno, pos)
        return IRI(value)

    def line(self, line: str, lineno: int):
        """Parse one line; returns None for blank/comment lines, else (s, p, o, g)."""
        pos = _WS.match(line).end()
        if pos >= len(line) or line[pos] == "#":
            return None
        start = pos
        s, pos = self.term(line, pos, lineno)
        if type(s) is Literal:
            self.fail("subject must be an IRI or blank node", lineno, start)
        pos = _WS.match(line, pos).end()
        start = pos
        p, pos = self.term(line, pos, lineno)
        if type(p) is not IRI:
            self.fail("predicate must be an IRI", lineno, start)
        pos = _WS.match(line, pos).end()
        o, pos = self.term(line, pos, lineno)
        pos = _WS.match(line, pos).end()
        g = None
        if pos < len(line) and line[pos] != ".":
            start = pos
            if not self.quads:
                self.fail("expected '.' at end of triple", lineno, pos)
            g, pos = self.term(line, pos, lineno)
            if type(g) is not IRI:
                # blank-node graph labels are legal N-Quads but graph names here are IRIs
                self.fail("graph label must be an IRI", lineno, start)
            pos = _WS.match(line, pos).end()
        if pos >= len(line) or line[pos] != ".":
            self.fail("expected '.' at end of statement", lineno, pos)
        pos = _WS.match(line, pos + 1).end()
        if pos < len(line) and line[pos] != "#":
            self.fail(f"unexpected content after '.': {line[pos:]!r}", lineno, pos)
        return s, p, o, g


def _lines(text: str):
    # N-Triples allows CR, LF or CRLF line ends
    return text.replace("\r\n", "\n").replace("\r", "\n").split("\n")


def parse_ntriples(text: str, graph: Graph | None = None) -> Graph:
    graph = graph if graph is not None else Graph()
    parser = _LineParser(quads=False)
    add = graph.add
    for lineno, line in enumerate(_lines(text), 1):
        stmt = parser.fast(line) or parser.line(line, lineno)
        if stmt is not None:
            add(stmt[:3])
    return graph


def parse_nquads(text: str, dataset: Dataset | None = None) -> Dataset:
    dataset = dataset if dataset is not None else Dataset()
    parser = _LineParser(quads=True)
    for lineno, line in enumerate(_lines(text), 1):
        stmt = parser.fast(line) or parser.line(line, lineno)
        if stmt is not None:
            dataset.graph(stmt[3]).add(stmt[:3])
    return dataset
