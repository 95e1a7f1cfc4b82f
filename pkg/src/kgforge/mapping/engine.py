"""Execute a MappingPlan over tables."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from urllib.parse import quote

from ..dataprep import Table, parse_as
from ..rdf import XSD, BlankNode, Graph, IRI, Literal, Term, is_absolute_iri
from ..rdf import xsd
from ..rdf.iri import resolve
from ..rdf.terms import _NEEDS_IRI_ESCAPE
from .plan import MappingError, MappingPlan, MappingRule, Placeholder, TermTemplate, eval_filter

# datatypes whose cell values are normalised with the data-prep parsers first
_CASTS = {
    XSD + "integer": "integer",
    XSD + "decimal": "decimal",
    XSD + "boolean": "boolean",
    XSD + "date": "date",
    XSD + "dateTime": "datetime",
}


@dataclass
class SkippedStatement:
    rule: str
    row: int
    column: str | None
    reason: str


@dataclass
class MappingLog:
    rows_processed: int = 0
    rows_filtered: int = 0
    triples_emitted: int = 0  # instantiated triples, before duplicates collapse
    duplicates_collapsed: int = 0
    skipped_statements: list[SkippedStatement] = field(default_factory=list)

    @property
    def graph_size(self) -> int:
        return self.triples_emitted - self.duplicates_collapsed

    def merge(self, other: "MappingLog") -> None:
        self.rows_processed += other.rows_processed
        self.rows_filtered += other.rows_filtered
        self.triples_emitted += other.triples_emitted
        self.duplicates_collapsed += other.duplicates_collapsed
        self.skipped_statements += other.skipped_statements

    def to_dict(self) -> dict:
        data = asdict(self)
        data["graph_size"] = self.graph_size
        return data


class _Skip(Exception):
    def __init__(self, column: str | None, reason: str):
        self.column = column
        self.reason = reason


def encode_value(value: str) -> str:
    """Percent-encode a cell value for use inside an IRI (unreserved set kept)."""
    return quote(value, safe="-._~")


def _fill(segments: tuple, row: dict, encode: bool) -> str:
    parts = []
    for seg in segments:
        if isinstance(seg, Placeholder):
            value = row[seg.column]
            if value is None:
                raise _Skip(seg.column, f"null in column {seg.column!r}")
            parts.append(value if (seg.raw or not encode) else encode_value(value))
        else:
            parts.append(seg)
    return "".join(parts)


class _RowContext:
    def __init__(self, plan: MappingPlan):
        self.plan = plan
        self.bnodes: dict[tuple, BlankNode] = {}

    def instantiate(self, tpl: TermTemplate, rule: MappingRule, index: int, row: dict) -> Term:
        kind = tpl.kind
        if kind == "constant_iri":
            return IRI(tpl.value)
        if kind == "row_blank_node":
            key = (rule.source, index, tpl.value)
            node = self.bnodes.get(key)
            if node is None:
                node = self.bnodes[key] = BlankNode()
            return node
        if kind == "iri_template":
            text = _fill(tpl.segments, row, encode=True)
            if not is_absolute_iri(text) and self.plan.base is not None:
                text = resolve(self.plan.base, text)
            if not is_absolute_iri(text):
                raise _Skip(tpl.columns[0], f"IRI {text!r} is not absolute")
            if _NEEDS_IRI_ESCAPE.search(text):
                raise _Skip(tpl.columns[0], f"IRI {text!r} contains characters not allowed in an IRI")
            return IRI(text)
        if kind == "constant_literal":
            return Literal(tpl.value, tpl.datatype, tpl.language)
        lexical = _fill(tpl.segments, row, encode=False)
        return _typed_literal(lexical, tpl, tpl.columns[0])


def _typed_literal(lexical: str, tpl: TermTemplate, column: str) -> Literal:
    dt = tpl.datatype
    if dt is None:
        return Literal(lexical, None, tpl.language)
    if dt in _CASTS:
        cast = parse_as(lexical, _CASTS[dt])
        if cast is None:
            raise _Skip(column, f"value {lexical!r} is not a valid {_short(dt)}")
        lexical = cast
    elif xsd.is_known(dt) and not xsd.is_valid(lexical, dt):
        raise _Skip(column, f"value {lexical!r} is not a valid {_short(dt)}")
    return Literal(lexical, dt)


def _short(dt: str) -> str:
    return "xsd:" + dt[len(XSD) :] if dt.startswith(XSD) else f"<{dt}>"


def check_plan_against_tables(plan: MappingPlan, tables: dict[str, Table]) -> None:
    """Raise MappingError for any missing source table or referenced column."""
    for rule in plan.rules:
        if rule.source not in tables:
            raise MappingError(f"rule {rule.name!r}: source table {rule.source!r} not found", rule.line)
        names = set(tables[rule.source].column_names)
        for col in rule.columns:
            if col not in names:
                raise MappingError(
                    f"rule {rule.name!r}: table {rule.source!r} has no column {col!r}", rule.line
                )


def apply_mapping(plan: MappingPlan, tables: dict[str, Table]) -> tuple[Graph, MappingLog]:
    """Run every rule over its source table.

    Statements whose templates hit a null cell or yield an invalid term are
    skipped and logged; the rest of the row is still mapped.
    """
    check_plan_against_tables(plan, tables)
    graph = Graph()
    log = MappingLog()
    ctx = _RowContext(plan)
    for rule in plan.rules:
        table = tables[rule.source]
        for index, record in enumerate(table.records()):
            log.rows_processed += 1
            if rule.row_filter is not None and not eval_filter(rule.row_filter, record):
                log.rows_filtered += 1
                continue
            try:
                subject = ctx.instantiate(rule.subject_template, rule, index, record)
                subject_skip = None
            except _Skip as skip:
                subject, subject_skip = None, skip
            for st in rule.statements:
                if subject_skip is not None:
                    log.skipped_statements.append(
                        SkippedStatement(rule.name, index, subject_skip.column, "subject: " + subject_skip.reason)
                    )
                    continue
                try:
                    obj = ctx.instantiate(st.object, rule, index, record)
                except _Skip as skip:
                    log.skipped_statements.append(SkippedStatement(rule.name, index, skip.column, skip.reason))
                    continue
                log.triples_emitted += 1
                if not graph.add((subject, st.predicate, obj)):
                    log.duplicates_collapsed += 1
    return graph, log
