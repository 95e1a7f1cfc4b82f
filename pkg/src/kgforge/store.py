"""In-memory triple store with SPO/POS/OSP permutation indexes.

Terms are interned to integer ids. Every graph (the default graph and each
named graph) keeps its own three indexes; a reference-counted union index
answers queries over all graphs at once without duplicates.

Writers need exclusive access. Any number of readers may run concurrently once
loading has finished.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable, Iterator

from .rdf.graph import Dataset, Graph, Triple, check_triple
from .rdf.terms import IRI, Term


class _DefaultGraph:
    __slots__ = ()

    def __repr__(self):
        return "DEFAULT_GRAPH"


DEFAULT_GRAPH = _DefaultGraph()
"""Graph key selecting only the default graph (None selects the union)."""

INDEXES = ("spo", "pos", "osp")


@dataclass(frozen=True)
class StoreStats:
    triple_count: int
    graph_count: int
    distinct_subjects: int
    distinct_predicates: int
    distinct_objects: int

    def to_dict(self) -> dict:
        return asdict(self)


class _Index:
    __slots__ = ("spo", "pos", "osp", "order")

    def __init__(self):
        self.spo: dict[int, dict[int, set[int]]] = {}
        self.pos: dict[int, dict[int, set[int]]] = {}
        self.osp: dict[int, dict[int, set[int]]] = {}
        self.order: dict[tuple[int, int, int], None] = {}

    def add(self, s: int, p: int, o: int) -> bool:
        key = (s, p, o)
        if key in self.order:
            return False
        self.order[key] = None
        self.spo.setdefault(s, {}).setdefault(p, set()).add(o)
        self.pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self.osp.setdefault(o, {}).setdefault(s, set()).add(p)
        return True

    def remove(self, s: int, p: int, o: int) -> bool:
        key = (s, p, o)
        if key not in self.order:
            return False
        del self.order[key]
        for idx, a, b, c in ((self.spo, s, p, o), (self.pos, p, o, s), (self.osp, o, s, p)):
            inner = idx[a]
            inner[b].discard(c)
            if not inner[b]:
                del inner[b]
                if not inner:
                    del idx[a]
        return True

    def __len__(self):
        return len(self.order)

    def match(self, s: int | None, p: int | None, o: int | None) -> Iterator[tuple[int, int, int]]:
        """Route to the index with the longest bound prefix."""
        if s is not None:
            by_p = self.spo.get(s)
            if by_p is None:
                return
            if p is not None:
                objs = by_p.get(p)
                if objs is None:
                    return
                if o is not None:
                    if o in objs:
                        yield (s, p, o)
                    return
                for o2 in objs:
                    yield (s, p, o2)
                return
            if o is not None:
                by_s = self.osp.get(o)
                preds = by_s.get(s) if by_s else None
                if preds:
                    for p2 in preds:
                        yield (s, p2, o)
                return
            for p2, objs in by_p.items():
                for o2 in objs:
                    yield (s, p2, o2)
            return
        if p is not None:
            by_o = self.pos.get(p)
            if by_o is None:
                return
            if o is not None:
                subs = by_o.get(o)
                if subs:
                    for s2 in subs:
                        yield (s2, p, o)
                return
            for o2, subs in by_o.items():
                for s2 in subs:
                    yield (s2, p, o2)
            return
        if o is not None:
            by_s = self.osp.get(o)
            if by_s is None:
                return
            for s2, preds in by_s.items():
                for p2 in preds:
                    yield (s2, p2, o)
            return
        yield from self.order

    def match_via(self, index: str, s, p, o) -> Iterator[tuple[int, int, int]]:
        """Answer any pattern from one named permutation index (consistency checks)."""
        idx = getattr(self, index)
        for a, inner in idx.items():
            for b, leaves in inner.items():
                for c in leaves:
                    if index == "spo":
                        t = (a, b, c)
                    elif index == "pos":
                        t = (c, a, b)
                    else:
                        t = (b, c, a)
                    if (s is None or t[0] == s) and (p is None or t[1] == p) and (o is None or t[2] == o):
                        yield t

    def count(self, s, p, o) -> int:
        if s is None and p is None and o is None:
            return len(self.order)
        if s is not None and p is not None and o is None:
            return len(self.spo.get(s, {}).get(p, ()))
        if p is not None and o is not None and s is None:
            return len(self.pos.get(p, {}).get(o, ()))
        if s is not None and o is not None and p is None:
            return len(self.osp.get(o, {}).get(s, ()))
        if s is not None and p is None and o is None:
            return sum(len(v) for v in self.spo.get(s, {}).values())
        if p is not None and s is None and o is None:
            return sum(len(v) for v in self.pos.get(p, {}).values())
        if o is not None and s is None and p is None:
            return sum(len(v) for v in self.osp.get(o, {}).values())
        return 1 if (s, p, o) in self.order else 0


class TripleStore:
    def __init__(self):
        self._ids: dict[Term, int] = {}
        self._terms: list[Term] = []
        self._graphs: dict[object, _Index] = {}
        self._union = _Index()
        self._refs: dict[tuple[int, int, int], int] = {}

    # -- term dictionary ---------------------------------------------------

    def intern(self, term: Term) -> int:
        tid = self._ids.get(term)
        if tid is None:
            tid = self._ids[term] = len(self._terms)
            self._terms.append(term)
        return tid

    def lookup(self, term: Term) -> int | None:
        return self._ids.get(term)

    def term(self, tid: int) -> Term:
        return self._terms[tid]

    # -- writes --------------------------------------------------------------

    def _graph_index(self, graph) -> _Index:
        key = DEFAULT_GRAPH if graph is None else graph
        if key is not DEFAULT_GRAPH and type(key) is not IRI:
            raise ValueError(f"graph name must be an IRI, got {graph!r}")
        idx = self._graphs.get(key)
        if idx is None:
            idx = self._graphs[key] = _Index()
        return idx

    def add_ids(self, s: int, p: int, o: int, graph=None) -> bool:
        if not self._graph_index(graph).add(s, p, o):
            return False
        key = (s, p, o)
        n = self._refs.get(key, 0)
        self._refs[key] = n + 1
        if n == 0:
            self._union.add(s, p, o)
        return True

    def add(self, triple: Triple | tuple, graph: IRI | None = None) -> bool:
        """Add one triple to `graph` (None: the default graph)."""
        s, p, o = triple
        check_triple(s, p, o)
        return self.add_ids(self.intern(s), self.intern(p), self.intern(o), graph)

    def remove(self, triple: Triple | tuple, graph: IRI | None = None) -> bool:
        ids = [self._ids.get(t) for t in triple]
        if None in ids:
            return False
        key = DEFAULT_GRAPH if graph is None else graph
        idx = self._graphs.get(key)
        if idx is None or not idx.remove(*ids):
            return False
        key3 = tuple(ids)
        self._refs[key3] -= 1
        if self._refs[key3] == 0:
            del self._refs[key3]
            self._union.remove(*ids)
        return True

    def import_(self, data: Graph | Dataset | Iterable[Triple], target_graph: IRI | None = None) -> int:
        """Import triples; returns how many were new to their target graph.

        With a Dataset and no target, default and named graphs keep their
        names; a target graph collapses everything into that one graph.
        """
        added = 0
        if isinstance(data, Dataset):
            for s, p, o, g in data.quads():
                added += self.add((s, p, o), target_graph if target_graph is not None else g)
            return added
        for t in data:
            added += self.add(t, target_graph)
        return added

    # -- reads ---------------------------------------------------------------

    def _select(self, graph) -> _Index | None:
        if graph is None:
            return self._union
        return self._graphs.get(graph)

    def match_ids(self, s: int | None, p: int | None, o: int | None, graph=None) -> Iterator[tuple[int, int, int]]:
        idx = self._select(graph)
        if idx is None:
            return iter(())
        return idx.match(s, p, o)

    def match(self, pattern=(None, None, None), graph=None) -> Iterator[Triple]:
        """Stored triples matching `pattern`, each exactly once.

        Pattern positions are terms or None (wildcard). `graph` None searches
        the union of all graphs, DEFAULT_GRAPH only the default graph, an IRI
        one named graph; an unknown graph yields nothing.
        """
        ids = []
        for t in pattern:
            if t is None:
                ids.append(None)
                continue
            tid = self._ids.get(t)
            if tid is None:
                return
            ids.append(tid)
        terms = self._terms
        for s, p, o in self.match_ids(ids[0], ids[1], ids[2], graph):
            yield Triple(terms[s], terms[p], terms[o])

    def match_via(self, index: str, pattern, graph=None) -> set[Triple]:
        """Result set of `pattern` computed from one permutation index only."""
        if index not in INDEXES:
            raise ValueError(f"unknown index {index!r}")
        idx = self._select(graph)
        ids = [None if t is None else self._ids.get(t, -1) for t in pattern]
        if idx is None:
            return set()
        terms = self._terms
        return {Triple(terms[s], terms[p], terms[o]) for s, p, o in idx.match_via(index, *ids)}

    def count_ids(self, s: int | None, p: int | None, o: int | None, graph=None) -> int:
        idx = self._select(graph)
        return 0 if idx is None else idx.count(s, p, o)

    def __contains__(self, triple) -> bool:
        ids = [self._ids.get(t) for t in triple]
        return None not in ids and tuple(ids) in self._union.order

    def __len__(self) -> int:
        return len(self._union)

    def __iter__(self) -> Iterator[Triple]:
        return self.match()

    def graph_names(self) -> list[IRI]:
        return [g for g, idx in self._graphs.items() if g is not DEFAULT_GRAPH and len(idx)]

    def graph(self, name=None) -> Graph:
        """Copy of one graph (None: the default graph)."""
        key = DEFAULT_GRAPH if name is None else name
        return Graph(self.match(graph=key))

    def to_dataset(self) -> Dataset:
        ds = Dataset()
        terms = self._terms
        for key, idx in self._graphs.items():
            target = ds.default_graph if key is DEFAULT_GRAPH else ds.graph(key)
            for s, p, o in idx.order:
                target.add((terms[s], terms[p], terms[o]))
        return ds

    def stats(self) -> StoreStats:
        u = self._union
        return StoreStats(
            triple_count=len(u),
            graph_count=sum(1 for idx in self._graphs.values() if len(idx)),
            distinct_subjects=len(u.spo),
            distinct_predicates=len(u.pos),
            distinct_objects=len(u.osp),
        )

    def __repr__(self):
        return f"<TripleStore {len(self)} triples in {len(self._graphs)} graphs>"
