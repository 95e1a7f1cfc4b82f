"""Query evaluation over a TripleStore.

The query dataset is the union of every graph in the store. Solutions are
dicts from variable name to term; a missing key is an unbound variable.
"""

from __future__ import annotations

from ..rdf.graph import Dataset, Graph, check_triple
from ..rdf.terms import XSD_INTEGER, BlankNode, Literal
from ..store import TripleStore
from .ast import (
    BGP,
    GroupPattern,
    OptionalPattern,
    Query,
    SubGroup,
    TriplePattern,
    UnionPattern,
    Var,
)
from .expr import ExprError, as_term, evaluate_expr, filter_passes, order_key
from .parser import parse_query
from .results import SolutionSequence


def _compatible(a: dict, b: dict) -> bool:
    if len(b) < len(a):
        a, b = b, a
    for k, v in a.items():
        w = b.get(k)
        if w is not None and w != v:
            return False
    return True


def _always_bound(rows: list[dict]) -> set[str]:
    if not rows:
        return set()
    keys = set(rows[0])
    for row in rows[1:]:
        keys &= row.keys()
        if not keys:
            break
    return keys


def _candidates(left: list[dict], right: list[dict]):
    """Yield (l, [r...]) pairs, pre-filtering by a hash on always-bound shared keys."""
    shared = sorted(_always_bound(left) & _always_bound(right))
    if not shared:
        for row in left:
            yield row, right
        return
    table: dict[tuple, list[dict]] = {}
    for row in right:
        table.setdefault(tuple(row[k] for k in shared), []).append(row)
    for row in left:
        yield row, table.get(tuple(row[k] for k in shared), ())


def join(left: list[dict], right: list[dict]) -> list[dict]:
    out = []
    for row, cands in _candidates(left, right):
        for other in cands:
            if _compatible(row, other):
                out.append({**row, **other})
    return out


def left_join(left: list[dict], right: list[dict], conditions: list) -> list[dict]:
    out = []
    for row, cands in _candidates(left, right):
        hit = False
        for other in cands:
            if _compatible(row, other):
                merged = {**row, **other}
                if all(filter_passes(c, merged) for c in conditions):
                    out.append(merged)
                    hit = True
        if not hit:
            out.append(row)
    return out


class Evaluator:
    def __init__(self, store: TripleStore):
        self.store = store

    # -- basic graph patterns -------------------------------------------------

    def plan(self, patterns: list[TriplePattern], bound: set[str]) -> list[TriplePattern]:
        """Greedy join order: cheapest estimated pattern next, given bound variables."""
        store = self.store
        remaining = list(patterns)
        bound = set(bound)
        ordered = []
        while remaining:
            best, best_cost = None, None
            for tp in remaining:
                ids = []
                unknown = False
                bound_vars = 0
                for x in tp:
                    if isinstance(x, Var):
                        ids.append(None)
                        bound_vars += x.name in bound
                    else:
                        tid = store.lookup(x)
                        unknown |= tid is None
                        ids.append(tid)
                cost = 0 if unknown else store.count_ids(*ids) * (0.01**bound_vars)
                if best_cost is None or cost < best_cost:
                    best, best_cost = tp, cost
            remaining.remove(best)
            ordered.append(best)
            bound.update(v.name for v in best.variables())
        return ordered

    def bgp(self, patterns: list[TriplePattern], seeds: list[dict]) -> list[dict]:
        if not patterns or not seeds:
            return seeds
        sols = seeds
        for tp in self.plan(patterns, _always_bound(seeds)):
            out: list[dict] = []
            for sol in sols:
                out.extend(self.match_pattern(tp, sol))
            sols = out
            if not sols:
                break
        return sols

    def match_pattern(self, tp: TriplePattern, sol: dict):
        store = self.store
        ids = []
        free = []  # (position, var name)
        for pos, x in enumerate(tp):
            if isinstance(x, Var):
                value = sol.get(x.name)
                if value is None:
                    ids.append(None)
                    free.append((pos, x.name))
                    continue
                x = value
            tid = store.lookup(x)
            if tid is None:
                return
            ids.append(tid)
        term = store.term
        for found in store.match_ids(*ids):
            row = dict(sol)
            ok = True
            for pos, name in free:
                value = term(found[pos])
                seen = row.get(name)
                if seen is None:
                    row[name] = value
                elif seen != value:
                    ok = False
                    break
            if ok:
                yield row

    # -- groups ---------------------------------------------------------------

    def group(self, group: GroupPattern) -> list[dict]:
        sols: list[dict] = [{}]
        for el in group.elements:
            if isinstance(el, BGP):
                sols = self.bgp(el.patterns, sols)
            elif isinstance(el, SubGroup):
                sols = join(sols, self.group(el.group))
            elif isinstance(el, UnionPattern):
                right = [row for branch in el.branches for row in self.group(branch)]
                sols = join(sols, right)
            elif isinstance(el, OptionalPattern):
                inner = GroupPattern(el.group.elements, [])
                sols = left_join(sols, self.group(inner), el.group.filters)
            else:
                raise TypeError(f"unknown pattern element {el!r}")
        for condition in group.filters:
            sols = [row for row in sols if filter_passes(condition, row)]
        return sols

    # -- solution modifiers -----------------------------------------------------

    def aggregate(self, rows: list[dict], query: Query) -> list[dict]:
        keys = query.group_by
        groups: dict[tuple, list[dict]] = {}
        for row in rows:
            groups.setdefault(tuple(row.get(k) for k in keys), []).append(row)
        if not keys and not groups:
            groups[()] = []
        out = []
        for key, members in groups.items():
            row = {k: v for k, v in zip(keys, key) if v is not None}
            for agg in query.aggregates:
                if agg.var is None:
                    values = [frozenset(m.items()) for m in members]
                else:
                    values = [m[agg.var] for m in members if agg.var in m]
                count = len(set(values)) if agg.distinct else len(values)
                row[agg.alias] = Literal(str(count), XSD_INTEGER)
            out.append(row)
        return out

    def order(self, rows: list[dict], order_by: list) -> list[dict]:
        if not order_by:
            return rows
        keyed = []
        for row in rows:
            keys = []
            for expr, _ in order_by:
                try:
                    keys.append(order_key(as_term(evaluate_expr(expr, row))))
                except ExprError:
                    keys.append(order_key(None))
            keyed.append((keys, row))
        # one stable pass per key, least significant first
        for index in range(len(order_by) - 1, -1, -1):
            keyed.sort(key=lambda kr: kr[0][index], reverse=not order_by[index][1])
        return [row for _, row in keyed]

    def solutions(self, query: Query) -> list[dict]:
        rows = self.group(query.pattern)
        if query.aggregates or query.group_by:
            rows = self.aggregate(rows, query)
        return self.order(rows, query.order_by)

    def run(self, query: Query):
        if query.form == "ASK":
            return bool(self.group(query.pattern))
        rows = self.solutions(query)
        if query.form == "CONSTRUCT":
            return self.construct(query, _slice(rows, query))
        names = query.variables
        wanted = set(names)
        rows = [{k: v for k, v in row.items() if k in wanted} for row in rows]
        if query.distinct:
            seen = set()
            unique = []
            for row in rows:
                key = frozenset(row.items())
                if key not in seen:
                    seen.add(key)
                    unique.append(row)
            rows = unique
        return SolutionSequence(names, _slice(rows, query))

    def construct(self, query: Query, rows: list[dict]) -> Graph:
        graph = Graph()
        for row in rows:
            fresh: dict[str, BlankNode] = {}
            for tp in query.template:
                triple = []
                for x in tp:
                    if isinstance(x, Var):
                        if x.is_blank:
                            x = fresh.setdefault(x.name, BlankNode())
                        else:
                            x = row.get(x.name)
                            if x is None:
                                break
                    triple.append(x)
                else:
                    try:
                        check_triple(*triple)
                    except ValueError:
                        continue
                    graph.add(tuple(triple))
        return graph


def _slice(rows: list, query: Query) -> list:
    rows = rows[query.offset :]
    if query.limit is not None:
        rows = rows[: query.limit]
    return rows


def as_store(data) -> TripleStore:
    if isinstance(data, TripleStore):
        return data
    store = TripleStore()
    if isinstance(data, (Graph, Dataset)):
        store.import_(data)
    else:
        for triple in data:
            store.add(triple)
    return store


def evaluate(query: Query | str, store) -> SolutionSequence | bool | Graph:
    """Run a query. SELECT gives a SolutionSequence, ASK a bool, CONSTRUCT a Graph."""
    if isinstance(query, str):
        query = parse_query(query)
    return Evaluator(as_store(store)).run(query)
