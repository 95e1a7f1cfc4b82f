"""Query syntax tree for the supported SPARQL fragment."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..rdf.terms import Term


class QueryError(Exception):
    """Base class for query parse and feature errors."""


class QuerySyntaxError(QueryError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


class UnsupportedFeatureError(QueryError):
    def __init__(self, feature: str, line: int | None = None, column: int | None = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"unsupported feature: {feature}{where}")
        self.feature = feature
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Var:
    name: str

    @property
    def is_blank(self) -> bool:
        # blank nodes in patterns behave as variables that cannot be projected
        return self.name.startswith("_:")

    def __str__(self):
        return self.name if self.is_blank else "?" + self.name


PatternTerm = Union[Var, Term]


@dataclass(frozen=True)
class TriplePattern:
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def __iter__(self):
        return iter((self.subject, self.predicate, self.object))

    def variables(self) -> list[Var]:
        return [x for x in self if isinstance(x, Var)]


# -- expressions ---------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    term: Term


@dataclass(frozen=True)
class Op:
    """Operator node: `=` `!=` `<` `>` `<=` `>=` `&&` `||` `!` `in` `notin`.

    For `in`/`notin` the first argument is the tested expression and the rest
    are the list members.
    """

    op: str
    args: tuple


@dataclass(frozen=True)
class Call:
    name: str  # upper-cased built-in name
    args: tuple


Expression = Union[Var, Const, Op, Call]


def expression_vars(expr) -> set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, (Op, Call)):
        out: set[str] = set()
        for arg in expr.args:
            out |= expression_vars(arg)
        return out
    return set()


# -- graph patterns ------------------------------------------------------------


@dataclass
class BGP:
    patterns: list[TriplePattern] = field(default_factory=list)


@dataclass
class OptionalPattern:
    group: "GroupPattern"


@dataclass
class UnionPattern:
    branches: list["GroupPattern"]


@dataclass
class SubGroup:
    group: "GroupPattern"


Element = Union[BGP, OptionalPattern, UnionPattern, SubGroup]


@dataclass
class GroupPattern:
    """A `{ ... }` group: pattern elements in source order plus its filters.

    Filters apply to the whole group regardless of where they appear.
    """

    elements: list = field(default_factory=list)
    filters: list = field(default_factory=list)

    @property
    def triple_patterns(self) -> list[TriplePattern]:
        return [tp for el in self.elements if isinstance(el, BGP) for tp in el.patterns]

    @property
    def optionals(self) -> list["GroupPattern"]:
        return [el.group for el in self.elements if isinstance(el, OptionalPattern)]

    @property
    def unions(self) -> list[list["GroupPattern"]]:
        return [el.branches for el in self.elements if isinstance(el, UnionPattern)]

    def variables(self) -> list[str]:
        """Named variables in order of first appearance (blank-node vars excluded)."""
        seen: dict[str, None] = {}
        self._collect(seen)
        return list(seen)

    def _collect(self, seen: dict) -> None:
        for el in self.elements:
            if isinstance(el, BGP):
                for tp in el.patterns:
                    for v in tp.variables():
                        if not v.is_blank:
                            seen.setdefault(v.name)
            elif isinstance(el, UnionPattern):
                for branch in el.branches:
                    branch._collect(seen)
            else:
                el.group._collect(seen)


@dataclass(frozen=True)
class CountAggregate:
    alias: str
    var: str | None  # None means COUNT(*)
    distinct: bool = False


@dataclass
class Query:
    form: str  # SELECT, ASK or CONSTRUCT
    pattern: GroupPattern
    projection: list | None = None  # names and CountAggregates; None means `*`
    distinct: bool = False
    order_by: list[tuple] = field(default_factory=list)  # (expression, ascending)
    limit: int | None = None
    offset: int = 0
    group_by: list[str] = field(default_factory=list)
    template: list[TriplePattern] = field(default_factory=list)
    prefixes: dict[str, str] = field(default_factory=dict)

    @property
    def aggregates(self) -> list[CountAggregate]:
        return [p for p in self.projection or [] if isinstance(p, CountAggregate)]

    @property
    def variables(self) -> list[str]:
        """Names of the result columns, in projection order."""
        if self.projection is None:
            return self.pattern.variables()
        return [p.alias if isinstance(p, CountAggregate) else p for p in self.projection]
