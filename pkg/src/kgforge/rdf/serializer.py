"""Turtle, N-Triples and N-Quads writers.

Output follows the graph's insertion order. Blank nodes are relabelled
`b0, b1, ...` in first-seen order so repeated runs produce identical bytes.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping

from .graph import Dataset, Graph
from .terms import (
    IRI,
    RDF_TYPE,
    XSD_BOOLEAN,
    XSD_DECIMAL,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
    BlankNode,
    Term,
    escape_iri,
    escape_string,
)
from .turtle import PN_LOCAL, PN_PREFIX

FORMATS = ("turtle", "ntriples", "nquads")

_LOCAL_OK = re.compile(rf"(?:{PN_LOCAL})?\Z")
_PREFIX_OK = re.compile(rf"(?:{PN_PREFIX})?\Z")
_BARE = {
    XSD_INTEGER: re.compile(r"[+-]?[0-9]+\Z"),
    XSD_DECIMAL: re.compile(r"[+-]?[0-9]*\.[0-9]+\Z"),
    XSD_DOUBLE: re.compile(r"[+-]?(?:[0-9]+\.[0-9]*[eE][+-]?[0-9]+|\.[0-9]+[eE][+-]?[0-9]+|[0-9]+[eE][+-]?[0-9]+)\Z"),
    XSD_BOOLEAN: re.compile(r"(?:true|false)\Z"),
}


class _Labeller:
    def __init__(self):
        self.labels: dict[BlankNode, str] = {}

    def __call__(self, node: BlankNode) -> str:
        label = self.labels.get(node)
        if label is None:
            label = self.labels[node] = f"_:b{len(self.labels)}"
        return label


def _nt_term(term: Term, bnode: _Labeller) -> str:
    if type(term) is BlankNode:
        return bnode(term)
    return term.n3()


def _nt_lines(quads: Iterable, bnode: _Labeller) -> Iterable[str]:
    for s, p, o, g in quads:
        parts = [_nt_term(s, bnode), _nt_term(p, bnode), _nt_term(o, bnode)]
        if g is not None:
            parts.append(g.n3())
        yield " ".join(parts) + " .\n"


class _TurtleWriter:
    def __init__(self, prefixes: Mapping[str, str]):
        self.prefixes = {p: ns for p, ns in prefixes.items() if _PREFIX_OK.match(p)}
        # longest namespace first so the most specific prefix wins
        self.by_ns = sorted(((ns, p) for p, ns in self.prefixes.items()), key=lambda x: -len(x[0]))
        self.bnode = _Labeller()

    def iri(self, term: IRI) -> str:
        value = term.value
        for ns, prefix in self.by_ns:
            if value.startswith(ns):
                local = value[len(ns):]
                if "\\" not in local and _LOCAL_OK.match(local):
                    return f"{prefix}:{local}"
        return "<" + escape_iri(value) + ">"

    def term(self, term: Term) -> str:
        if type(term) is IRI:
            return self.iri(term)
        if type(term) is BlankNode:
            return self.bnode(term)
        if term.language:
            return '"' + escape_string(term.lexical) + '"@' + term.language
        bare = _BARE.get(term.datatype)
        if bare is not None and bare.match(term.lexical):
            return term.lexical
        quoted = '"' + escape_string(term.lexical) + '"'
        if term.datatype == XSD_STRING:
            return quoted
        return quoted + "^^" + self.iri(IRI(term.datatype))

    def write(self, graph: Graph) -> str:
        out = [f"@prefix {p}: <{escape_iri(ns)}> .\n" for p, ns in self.prefixes.items()]
        if out:
            out.append("\n")
        grouped: dict[Term, dict[Term, list[Term]]] = {}
        for s, p, o in graph:
            grouped.setdefault(s, {}).setdefault(p, []).append(o)
        for s, preds in grouped.items():
            chunks = []
            for p, objs in preds.items():
                verb = "a" if p == RDF_TYPE else self.iri(p)
                chunks.append(verb + " " + " , ".join(self.term(o) for o in objs))
            out.append(self.term(s) + " " + " ;\n    ".join(chunks) + " .\n")
        return "".join(out)


def serialize(
    data: Graph | Dataset,
    format: str = "turtle",
    prefixes: Mapping[str, str] | None = None,
    graph_name: IRI | None = None,
) -> str:
    """Serialize a Graph or Dataset.

    `graph_name` places a plain Graph into that named graph for N-Quads.
    Turtle and N-Triples cannot carry named graphs; passing a Dataset with
    named graphs to them raises ValueError.
    """
    if format not in FORMATS:
        raise ValueError(f"unknown RDF format {format!r}; expected one of {', '.join(FORMATS)}")
    if isinstance(data, Dataset):
        if format != "nquads":
            if data.named_graphs:
                raise ValueError(f"{format} cannot represent named graphs; use nquads")
            data = data.default_graph
        else:
            return "".join(_nt_lines(data.quads(), _Labeller()))
    if format == "turtle":
        return _TurtleWriter(prefixes or {}).write(data)
    g = graph_name if format == "nquads" else None
    return "".join(_nt_lines(((s, p, o, g) for s, p, o in data), _Labeller()))

