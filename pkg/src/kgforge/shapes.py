"""Shape constraints over the store, and competency queries wrapped as constraints.

Supported components: targets (targetClass, targetNode, targetSubjectsOf),
property constraints with sh:path (a predicate or [sh:inversePath p]) and
minCount, maxCount, datatype, class, nodeKind, pattern (+ flags), in,
minInclusive, maxInclusive; node-level nodeKind, class and in. Anything
else in the shapes namespace is rejected.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .rdf import RDF, RDF_TYPE, RDFS, SH, BlankNode, Graph, IRI, Literal, Term, parse_turtle, term_sort_key
from .rdf import xsd
from .sparql import QueryError, SolutionSequence, evaluate, parse_query
from .store import TripleStore

NODE_KINDS = {SH + "IRI": "IRI", SH + "Literal": "Literal", SH + "BlankNode": "BlankNode"}
EXPECTATIONS = ("ask_true", "ask_false", "nonempty", "empty")

_NODE_SHAPE = IRI(SH + "NodeShape")
_PROPERTY_SHAPE = IRI(SH + "PropertyShape")
_SUBCLASS = IRI(RDFS + "subClassOf")
_FIRST, _REST, _NIL = IRI(RDF + "first"), IRI(RDF + "rest"), IRI(RDF + "nil")
_TARGETS = {"targetClass": "class", "targetNode": "node", "targetSubjectsOf": "subjects_of"}
_DESCRIPTIVE = {"name", "description", "message", "severity", "order", "group", "deactivated"}
_PROPERTY_PARAMS = {"minCount", "maxCount", "datatype", "class", "nodeKind", "pattern", "flags", "in", "minInclusive", "maxInclusive"}
_NODE_PARAMS = {"nodeKind", "class", "in"}


class ShapeError(Exception):
    pass


@dataclass(frozen=True)
class PropertyConstraint:
    path: IRI
    inverse: bool = False
    params: tuple = ()  # sorted (name, value) pairs

    def param(self, name: str, default=None):
        for k, v in self.params:
            if k == name:
                return v
        return default

    @property
    def path_text(self) -> str:
        return f"^{self.path.value}" if self.inverse else self.path.value


@dataclass
class Shape:
    id: str
    targets: list[tuple[str, Term]]
    constraints: list[PropertyConstraint] = field(default_factory=list)
    node_constraints: list[tuple[str, object]] = field(default_factory=list)


@dataclass
class ShapeViolation:
    focus_node: str
    shape: str
    constraint: str
    message: str
    path: str | None = None
    value: str | None = None

    def sort_key(self):
        return (self.shape, self.focus_node, self.constraint, self.path or "", self.value or "")

    def to_dict(self) -> dict:
        return {
            "focus_node": self.focus_node,
            "shape": self.shape,
            "constraint": self.constraint,
            "path": self.path,
            "value": self.value,
            "message": self.message,
        }


@dataclass
class ConstraintResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class ValidationReport:
    violations: list[ShapeViolation] = field(default_factory=list)
    # one entry per query constraint when produced by run_query_constraints
    results: list[ConstraintResult] = field(default_factory=list)

    @property
    def conforms(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        data = {"conforms": self.conforms, "violations": [v.to_dict() for v in self.violations]}
        if self.results:
            data["results"] = [r.to_dict() for r in self.results]
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_markdown(self, title: str = "Validation report") -> str:
        lines = [f"# {title}", "", f"conforms: {'yes' if self.conforms else 'no'} ({len(self.violations)} violations)"]
        if self.results:
            lines += ["", "| constraint | result | detail |", "|---|---|---|"]
            lines += [f"| {r.name} | {'pass' if r.passed else 'fail'} | {r.detail} |" for r in self.results]
        if self.violations:
            lines += ["", "| shape | focus node | constraint | path | value | message |", "|---|---|---|---|---|---|"]
            for v in self.violations:
                cells = [v.shape, v.focus_node, v.constraint, v.path or "", v.value or "", v.message]
                lines.append("| " + " | ".join(c.replace("|", "\\|") for c in cells) + " |")
        return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- parsing

def _local(p: IRI) -> str | None:
    return p.value[len(SH):] if p.value.startswith(SH) else None


def _label(term: Term) -> str:
    return term.value if type(term) is IRI else term.n3()


def _rdf_list(graph: Graph, head: Term, where: str) -> list[Term]:
    items = []
    seen = set()
    node = head
    while node != _NIL:
        if node in seen or type(node) is Literal:
            raise ShapeError(f"{where}: malformed RDF list")
        seen.add(node)
        first = graph.objects(node, _FIRST)
        rest = graph.objects(node, _REST)
        if len(first) != 1 or len(rest) != 1:
            raise ShapeError(f"{where}: malformed RDF list")
        items.append(first[0])
        node = rest[0]
    return items


def _count_param(value: Term, name: str, where: str) -> int:
    n = xsd.parse_value(value.lexical, value.datatype) if type(value) is Literal else None
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ShapeError(f"{where}: sh:{name} must be a non-negative integer, got {value.n3()}")
    return n


def _numeric_param(value: Term, name: str, where: str):
    n = xsd.numeric_value(value)
    if n is None:
        raise ShapeError(f"{where}: sh:{name} must be a numeric literal, got {value.n3()}")
    return n


def _param(graph: Graph, name: str, values: list[Term], where: str):
    if len(values) != 1:
        raise ShapeError(f"{where}: sh:{name} given {len(values)} times")
    value = values[0]
    if name in ("minCount", "maxCount"):
        return _count_param(value, name, where)
    if name in ("datatype", "class"):
        if type(value) is not IRI:
            raise ShapeError(f"{where}: sh:{name} must be an IRI")
        return value
    if name == "nodeKind":
        if type(value) is not IRI or value.value not in NODE_KINDS:
            raise ShapeError(f"{where}: unsupported sh:nodeKind {value.n3()}")
        return NODE_KINDS[value.value]
    if name in ("pattern", "flags"):
        if type(value) is not Literal:
            raise ShapeError(f"{where}: sh:{name} must be a literal")
        return value.lexical
    if name == "in":
        return tuple(_rdf_list(graph, value, where))
    return _numeric_param(value, name, where)


def _grouped(graph: Graph, subject: Term) -> dict[str, list[Term]]:
    out: dict[str, list[Term]] = {}
    for _, p, o in graph.triples(subject, None, None):
        name = _local(p)
        if name is not None:
            out.setdefault(name, []).append(o)
    return out


def _property_constraint(graph: Graph, node: Term, shape_id: str) -> PropertyConstraint:
    where = f"shape {shape_id}"
    props = _grouped(graph, node)
    paths = props.pop("path", [])
    if len(paths) != 1:
        raise ShapeError(f"{where}: property shape needs exactly one sh:path")
    path = paths[0]
    inverse = False
    if type(path) is BlankNode:
        inner = _grouped(graph, path)
        if set(inner) != {"inversePath"} or len(inner["inversePath"]) != 1 or type(inner["inversePath"][0]) is not IRI:
            raise ShapeError(f"{where}: only predicate paths and [sh:inversePath p] are supported")
        path, inverse = inner["inversePath"][0], True
    elif type(path) is not IRI:
        raise ShapeError(f"{where}: sh:path must be an IRI")
    params = {}
    for name, values in props.items():
        if name in _DESCRIPTIVE:
            continue
        if name not in _PROPERTY_PARAMS:
            raise ShapeError(f"{where}: unsupported constraint parameter sh:{name}")
        params[name] = _param(graph, name, values, where)
    if "minCount" in params and "maxCount" in params and params["minCount"] > params["maxCount"]:
        raise ShapeError(f"{where}: sh:minCount {params['minCount']} exceeds sh:maxCount {params['maxCount']}")
    if "flags" in params and "pattern" not in params:
        raise ShapeError(f"{where}: sh:flags without sh:pattern")
    if "pattern" in params:
        try:
            re.compile(params["pattern"], _flags(params.get("flags", "")))
        except (re.error, ValueError) as exc:
            raise ShapeError(f"{where}: bad sh:pattern: {exc}") from None
    return PropertyConstraint(path, inverse, tuple(sorted(params.items())))


def _flags(text: str) -> int:
    table = {"i": re.I, "m": re.M, "s": re.S, "x": re.X}
    out = 0
    for ch in text:
        if ch not in table:
            raise ValueError(f"unsupported regex flag {ch!r}")
        out |= table[ch]
    return out


def parse_shapes(source: Graph | str) -> list[Shape]:
    """Read node shapes from a shapes graph (or Turtle text), sorted by id."""
    graph = parse_turtle(source) if isinstance(source, str) else source
    shape_nodes: set[Term] = set()
    for s, p, o in graph:
        if p == RDF_TYPE and o == _NODE_SHAPE:
            shape_nodes.add(s)
        elif _local(p) in _TARGETS or _local(p) == "property":
            shape_nodes.add(s)
    shapes = []
    for node in sorted(shape_nodes, key=term_sort_key):
        shape_id = _label(node)
        where = f"shape {shape_id}"
        props = _grouped(graph, node)
        targets: list[tuple[str, Term]] = []
        constraints: list[PropertyConstraint] = []
        node_constraints: list[tuple[str, object]] = []
        for name, values in sorted(props.items()):
            if name in _DESCRIPTIVE:
                continue
            if name in _TARGETS:
                for v in sorted(values, key=term_sort_key):
                    if name != "targetNode" and type(v) is not IRI:
                        raise ShapeError(f"{where}: sh:{name} must be an IRI")
                    targets.append((_TARGETS[name], v))
            elif name == "property":
                for v in values:
                    constraints.append(_property_constraint(graph, v, shape_id))
            elif name in _NODE_PARAMS:
                node_constraints.append((name, _param(graph, name, values, where)))
            else:
                raise ShapeError(f"{where}: unsupported constraint parameter sh:{name}")
        if not targets:
            raise ShapeError(f"{where}: shape has no target")
        constraints.sort(key=lambda c: (c.path_text, repr(c.params)))
        shapes.append(Shape(shape_id, targets, constraints, node_constraints))
    return shapes


# ---------------------------------------------------------------- validation

class _View:
    """Read helpers over a store with a cached subclass closure."""

    def __init__(self, store: TripleStore):
        self.store = store
        self._subs: dict[Term, set[Term]] = {}

    def subclasses(self, cls: Term) -> set[Term]:
        """Classes C' with C' rdfs:subClassOf* cls."""
        got = self._subs.get(cls)
        if got is None:
            got = {cls}
            stack = [cls]
            while stack:
                for s, _, _ in self.store.match((None, _SUBCLASS, stack.pop())):
                    if s not in got:
                        got.add(s)
                        stack.append(s)
            self._subs[cls] = got
        return got

    def instances(self, cls: Term) -> set[Term]:
        out = set()
        for c in self.subclasses(cls):
            out.update(t[0] for t in self.store.match((None, RDF_TYPE, c)))
        return out

    def is_instance(self, node: Term, cls: Term) -> bool:
        if type(node) is Literal:
            return False
        classes = self.subclasses(cls)
        return any(t[2] in classes for t in self.store.match((node, RDF_TYPE, None)))

    def values(self, focus: Term, c: PropertyConstraint) -> list[Term]:
        if c.inverse:
            found = [t[0] for t in self.store.match((None, c.path, focus))]
        elif type(focus) is Literal:
            found = []
        else:
            found = [t[2] for t in self.store.match((focus, c.path, None))]
        return sorted(found, key=term_sort_key)


def focus_nodes(store: TripleStore, shape: Shape, view: _View | None = None) -> list[Term]:
    view = view or _View(store)
    nodes: set[Term] = set()
    for kind, value in shape.targets:
        if kind == "class":
            nodes |= view.instances(value)
        elif kind == "node":
            nodes.add(value)
        else:
            nodes.update(t[0] for t in store.match((None, value, None)))
    return sorted(nodes, key=term_sort_key)


def _kind(term: Term) -> str:
    return "IRI" if type(term) is IRI else "BlankNode" if type(term) is BlankNode else "Literal"


def _value_checks(name: str, arg, value: Term, view: _View, flags: str = "") -> str | None:
    """Failure message for one value under one component, or None."""
    if name == "datatype":
        if type(value) is not Literal or value.datatype != arg.value:
            return f"value is not a literal of datatype {arg.value}"
        if xsd.is_known(arg.value) and not xsd.is_valid(value.lexical, arg.value):
            return f"ill-typed {arg.value} literal"
        return None
    if name == "class":
        return None if view.is_instance(value, arg) else f"value is not an instance of {arg.value}"
    if name == "nodeKind":
        return None if _kind(value) == arg else f"value is not of node kind {arg}"
    if name == "pattern":
        if type(value) is BlankNode:
            return "blank node cannot match a pattern"
        text = value.value if type(value) is IRI else value.lexical
        return None if re.search(arg, text, _flags(flags)) else f"value does not match pattern {arg!r}"
    if name == "in":
        return None if value in arg else "value is not in the allowed list"
    if name in ("minInclusive", "maxInclusive"):
        n = xsd.numeric_value(value)
        if n is None:
            return f"value is not numeric ({name} {arg})"
        ok = n >= arg if name == "minInclusive" else n <= arg
        return None if ok else f"value {'<' if name == 'minInclusive' else '>'} {arg}"
    raise AssertionError(name)


def validate(store: TripleStore, shapes: list[Shape]) -> ValidationReport:
    """Check every shape on every focus node; violations sorted by (shape, focus node, constraint)."""
    view = _View(store)
    out: list[ShapeViolation] = []
    for shape in shapes:
        for focus in focus_nodes(store, shape, view):
            fid = _label(focus)
            for name, arg in shape.node_constraints:
                msg = _value_checks(name, arg, focus, view)
                if msg:
                    out.append(ShapeViolation(fid, shape.id, f"sh:{name}", "focus node: " + msg, None, fid))
            for c in shape.constraints:
                values = view.values(focus, c)
                path = c.path_text
                lo, hi = c.param("minCount"), c.param("maxCount")
                if lo is not None and len(values) < lo:
                    out.append(ShapeViolation(fid, shape.id, "sh:minCount", f"{len(values)} values, at least {lo} required", path))
                if hi is not None and len(values) > hi:
                    out.append(ShapeViolation(fid, shape.id, "sh:maxCount", f"{len(values)} values, at most {hi} allowed", path))
                for name, arg in c.params:
                    if name in ("minCount", "maxCount", "flags"):
                        continue
                    for v in values:
                        msg = _value_checks(name, arg, v, view, c.param("flags", ""))
                        if msg:
                            out.append(ShapeViolation(fid, shape.id, f"sh:{name}", msg, path, _label(v)))
    out.sort(key=ShapeViolation.sort_key)
    return ValidationReport(out)


# ---------------------------------------------------------------- query constraints

@dataclass(frozen=True)
class QueryConstraint:
    name: str
    query: str
    expectation: str


def wrap_cq_as_constraint(cq_id: str, query_text: str, expectation: str) -> QueryConstraint:
    """Validate a competency query and wrap it as an executable constraint.

    Raises QueryError when the query does not parse, ValueError when the
    expectation does not fit the query form.
    """
    if expectation not in EXPECTATIONS:
        raise ValueError(f"{cq_id}: unknown expectation {expectation!r}; expected one of {', '.join(EXPECTATIONS)}")
    form = parse_query(query_text).form
    if expectation.startswith("ask_") != (form == "ASK"):
        raise ValueError(f"{cq_id}: expectation {expectation} does not fit a {form} query")
    return QueryConstraint(cq_id, query_text, expectation)


def check_expectation(outcome, expectation: str) -> tuple[bool, str]:
    """(passed, summary) for a query result against an expectation."""
    if isinstance(outcome, bool):
        summary = f"ASK {str(outcome).lower()}"
        return (outcome if expectation == "ask_true" else not outcome), summary
    size = len(outcome.rows) if isinstance(outcome, SolutionSequence) else len(outcome)
    unit = "row" if isinstance(outcome, SolutionSequence) else "triple"
    summary = f"{size} {unit}{'' if size == 1 else 's'}"
    return (size > 0 if expectation == "nonempty" else size == 0), summary


def run_query_constraints(store, constraints: list[QueryConstraint]) -> ValidationReport:
    """One result per constraint; failed constraints also become violations."""
    report = ValidationReport()
    for c in constraints:
        try:
            outcome = evaluate(c.query, store)
        except QueryError as exc:
            passed, detail = False, f"query error: {exc}"
        else:
            passed, detail = check_expectation(outcome, c.expectation)
        report.results.append(ConstraintResult(c.name, passed, detail))
        if not passed:
            report.violations.append(
                ShapeViolation("", c.name, f"query:{c.expectation}", f"expected {c.expectation}, got {detail}")
            )
    report.violations.sort(key=ShapeViolation.sort_key)
    return report
