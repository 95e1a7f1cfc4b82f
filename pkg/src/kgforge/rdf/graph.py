from __future__ import annotations

from typing import Iterable, Iterator, NamedTuple

from .terms import IRI, BlankNode, Literal, Term


class Triple(NamedTuple):
    subject: Term
    predicate: Term
    object: Term


def check_triple(s: Term, p: Term, o: Term) -> None:
    if type(s) is not IRI and type(s) is not BlankNode:
        raise ValueError(f"triple subject must be an IRI or blank node, got {s!r}")
    if type(p) is not IRI:
        raise ValueError(f"triple predicate must be an IRI, got {p!r}")
    if not isinstance(o, (IRI, BlankNode, Literal)):
        raise ValueError(f"triple object must be an RDF term, got {o!r}")


class Graph:
    """A set of triples that remembers insertion order.

    Ordering only affects serialization output; equality is set equality.
    """

    __slots__ = ("_triples",)

    def __init__(self, triples: Iterable[Triple] = ()):
        self._triples: dict[Triple, None] = {}
        for t in triples:
            self.add(t)

    def add(self, triple: Triple | tuple) -> bool:
        """Add a triple; returns False if it was already present."""
        s, p, o = triple
        if triple in self._triples:
            return False
        check_triple(s, p, o)
        self._triples[Triple(s, p, o)] = None
        return True

    def update(self, triples: Iterable[Triple]) -> int:
        return sum(1 for t in triples if self.add(t))

    def discard(self, triple: Triple | tuple) -> None:
        self._triples.pop(Triple(*triple), None)

    def __len__(self) -> int:
        return len(self._triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __contains__(self, triple) -> bool:
        return triple in self._triples

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._triples.keys() == other._triples.keys()

    def __repr__(self) -> str:
        return f"<Graph with {len(self)} triples>"

    def triples(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> Iterator[Triple]:
        """Linear-scan pattern match; None is a wildcard."""
        for t in self._triples:
            if (s is None or t[0] == s) and (p is None or t[1] == p) and (o is None or t[2] == o):
                yield t

    def objects(self, s: Term, p: Term) -> list[Term]:
        return [t[2] for t in self.triples(s, p, None)]

    def value(self, s: Term, p: Term) -> Term | None:
        for t in self.triples(s, p, None):
            return t[2]
        return None


class Dataset:
    """A default graph plus named graphs keyed by graph IRI."""

    __slots__ = ("default_graph", "named_graphs")

    def __init__(self, default_graph: Graph | None = None, named_graphs: dict[IRI, Graph] | None = None):
        self.default_graph = default_graph if default_graph is not None else Graph()
        self.named_graphs: dict[IRI, Graph] = dict(named_graphs or {})

    def graph(self, name: IRI | None) -> Graph:
        """The graph for `name`, created on first use; None is the default graph."""
        if name is None:
            return self.default_graph
        if type(name) is not IRI:
            raise ValueError(f"graph name must be an IRI, got {name!r}")
        g = self.named_graphs.get(name)
        if g is None:
            g = self.named_graphs[name] = Graph()
        return g

    def add(self, triple: Triple | tuple, graph: IRI | None = None) -> bool:
        return self.graph(graph).add(triple)

    def quads(self) -> Iterator[tuple[Term, Term, Term, IRI | None]]:
        for t in self.default_graph:
            yield (t[0], t[1], t[2], None)
        for name, g in self.named_graphs.items():
            for t in g:
                yield (t[0], t[1], t[2], name)

    def __len__(self) -> int:
        return len(self.default_graph) + sum(len(g) for g in self.named_graphs.values())

    def __repr__(self) -> str:
        return f"<Dataset default={len(self.default_graph)} named={len(self.named_graphs)}>"
