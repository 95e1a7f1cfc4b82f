"""Ontology vocabulary extraction, pitfall lint and mapping conformance."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .rdf import OWL, RDF, RDF_TYPE, RDFS, XSD, Graph, IRI, Literal

SEVERITIES = ("error", "warning", "info")

# code -> (severity, description)
CATALOGUE = {
    "CYCLE-SUBCLASS": ("error", "subclass cycle"),
    "DUAL-PROPERTY-KIND": ("error", "property declared both object and datatype property"),
    "DISJOINT-SUBCLASS": ("error", "class is a subclass of two disjoint classes"),
    "MISSING-DOMAIN": ("warning", "property without rdfs:domain"),
    "MISSING-RANGE": ("warning", "property without rdfs:range"),
    "MISSING-LABEL": ("info", "class or property without rdfs:label"),
    "ORPHAN-CLASS": ("info", "class not used by any property or subclass edge"),
}
CONFORMANCE_CODES = {
    "UNDECLARED-PREDICATE": "warning",
    "UNDECLARED-CLASS": "warning",
    "KIND-MISMATCH": "error",
}
# built-in vocabularies never count as undeclared
EXEMPT_NAMESPACES = (RDF, RDFS, OWL, XSD)

_CLASS_TYPES = {IRI(OWL + "Class"), IRI(RDFS + "Class")}
_OBJECT_PROPERTY = IRI(OWL + "ObjectProperty")
_DATATYPE_PROPERTY = IRI(OWL + "DatatypeProperty")
_UNTYPED_PROPERTY_TYPES = {
    IRI(RDF + "Property"),
    IRI(OWL + "TransitiveProperty"),
    IRI(OWL + "SymmetricProperty"),
    IRI(OWL + "FunctionalProperty"),
}
_ANNOTATION_PROPERTY = IRI(OWL + "AnnotationProperty")
SUBCLASS_OF = IRI(RDFS + "subClassOf")
DOMAIN = IRI(RDFS + "domain")
RANGE = IRI(RDFS + "range")
LABEL = IRI(RDFS + "label")
DISJOINT_WITH = IRI(OWL + "disjointWith")


@dataclass
class Vocabulary:
    classes: set[IRI] = field(default_factory=set)
    object_properties: set[IRI] = field(default_factory=set)
    datatype_properties: set[IRI] = field(default_factory=set)
    untyped_properties: set[IRI] = field(default_factory=set)
    annotation_properties: set[IRI] = field(default_factory=set)
    subclass_edges: set[tuple[IRI, IRI]] = field(default_factory=set)
    domains: dict[IRI, set[IRI]] = field(default_factory=dict)
    ranges: dict[IRI, set[IRI]] = field(default_factory=dict)
    labels: dict[IRI, list[tuple[str, str | None]]] = field(default_factory=dict)
    disjoint_pairs: set[tuple[IRI, IRI]] = field(default_factory=set)

    @property
    def properties(self) -> set[IRI]:
        return self.object_properties | self.datatype_properties | self.untyped_properties | self.annotation_properties

    def superclasses(self, cls: IRI) -> set[IRI]:
        """Reflexive-transitive superclasses of `cls`."""
        up: dict[IRI, set[IRI]] = {}
        for sub, sup in self.subclass_edges:
            up.setdefault(sub, set()).add(sup)
        seen = {cls}
        stack = [cls]
        while stack:
            for sup in up.get(stack.pop(), ()):
                if sup not in seen:
                    seen.add(sup)
                    stack.append(sup)
        return seen

    def is_empty(self) -> bool:
        return not (self.classes or self.properties or self.subclass_edges or self.labels or self.disjoint_pairs)

    def summary(self) -> dict:
        return {
            "classes": len(self.classes),
            "object_properties": len(self.object_properties),
            "datatype_properties": len(self.datatype_properties),
            "untyped_properties": len(self.untyped_properties),
            "annotation_properties": len(self.annotation_properties),
            "subclass_edges": len(self.subclass_edges),
            "disjoint_pairs": len(self.disjoint_pairs),
        }


def extract_vocabulary(graph: Graph) -> Vocabulary:
    """Collect declarations from an ontology graph. Blank-node subjects are ignored."""
    v = Vocabulary()
    for s, p, o in graph:
        if type(s) is not IRI:
            continue
        if p == RDF_TYPE:
            if o in _CLASS_TYPES:
                v.classes.add(s)
            elif o == _OBJECT_PROPERTY:
                v.object_properties.add(s)
            elif o == _DATATYPE_PROPERTY:
                v.datatype_properties.add(s)
            elif o in _UNTYPED_PROPERTY_TYPES:
                v.untyped_properties.add(s)
            elif o == _ANNOTATION_PROPERTY:
                v.annotation_properties.add(s)
        elif p == SUBCLASS_OF and type(o) is IRI:
            v.subclass_edges.add((s, o))
            v.classes.update((s, o))
        elif p == DOMAIN and type(o) is IRI:
            v.domains.setdefault(s, set()).add(o)
        elif p == RANGE and type(o) is IRI:
            v.ranges.setdefault(s, set()).add(o)
        elif p == LABEL and type(o) is Literal:
            v.labels.setdefault(s, []).append((o.lexical, o.language))
        elif p == DISJOINT_WITH and type(o) is IRI:
            v.disjoint_pairs.add((s, o))
            v.classes.update((s, o))
    # a property only seen in domain/range statements is still a property
    for prop in set(v.domains) | set(v.ranges):
        if prop not in v.properties:
            v.untyped_properties.add(prop)
    # untyped means "no kind given": drop those also typed explicitly
    v.untyped_properties -= v.object_properties | v.datatype_properties | v.annotation_properties
    for labels in v.labels.values():
        labels.sort(key=lambda x: (x[1] or "", x[0]))
    return v


@dataclass(frozen=True)
class LintFinding:
    code: str
    severity: str
    subject: IRI
    message: str

    def to_dict(self) -> dict:
        return {"code": self.code, "severity": self.severity, "subject": self.subject.value, "message": self.message}


def sort_findings(findings: list[LintFinding]) -> list[LintFinding]:
    return sorted(findings, key=lambda f: (SEVERITIES.index(f.severity), f.code, f.subject.value, f.message))


def _exempt(iri: IRI) -> bool:
    return iri.value.startswith(EXEMPT_NAMESPACES)


def _finding(code: str, subject: IRI, message: str) -> LintFinding:
    return LintFinding(code, CATALOGUE[code][0], subject, message)


def _cycles(edges: set[tuple[IRI, IRI]]) -> list[list[IRI]]:
    """Strongly connected components that contain a cycle (size > 1 or a self-loop)."""
    succ: dict[IRI, list[IRI]] = {}
    for a, b in edges:
        succ.setdefault(a, []).append(b)
        succ.setdefault(b, [])
    for targets in succ.values():
        targets.sort(key=lambda t: t.value)
    index: dict[IRI, int] = {}
    low: dict[IRI, int] = {}
    on_stack: set[IRI] = set()
    stack: list[IRI] = []
    comps: list[list[IRI]] = []
    counter = 0
    # iterative Tarjan
    for root in sorted(succ, key=lambda t: t.value):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            node, i = work.pop()
            if i == 0:
                index[node] = low[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            targets = succ[node]
            if i < len(targets):
                work.append((node, i + 1))
                nxt = targets[i]
                if nxt not in index:
                    work.append((nxt, 0))
                elif nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
                continue
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                if len(comp) > 1 or (node, node) in edges:
                    comps.append(sorted(comp, key=lambda t: t.value))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
    return comps


def lint(vocab: Vocabulary) -> list[LintFinding]:
    """Check the vocabulary against the fixed pitfall catalogue; findings sorted by (severity, code, subject)."""
    out: list[LintFinding] = []
    for comp in _cycles(vocab.subclass_edges):
        names = " -> ".join(c.value for c in comp)
        out.append(_finding("CYCLE-SUBCLASS", comp[0], f"subclass cycle among {names}"))
    for prop in vocab.object_properties & vocab.datatype_properties:
        out.append(_finding("DUAL-PROPERTY-KIND", prop, "declared as both owl:ObjectProperty and owl:DatatypeProperty"))
    disjoint = {frozenset(pair) for pair in vocab.disjoint_pairs if pair[0] != pair[1]}
    if disjoint:
        for cls in vocab.classes:
            supers = vocab.superclasses(cls)
            clashes = sorted(
                (tuple(sorted(p, key=lambda t: t.value)) for p in disjoint if p <= supers),
                key=lambda p: (p[0].value, p[1].value),
            )
            for a, b in clashes:
                out.append(_finding("DISJOINT-SUBCLASS", cls, f"subclass of disjoint classes {a.value} and {b.value}"))
    for prop in vocab.object_properties | vocab.datatype_properties | vocab.untyped_properties:
        if _exempt(prop):
            continue
        if not vocab.domains.get(prop):
            out.append(_finding("MISSING-DOMAIN", prop, "property has no rdfs:domain"))
        if not vocab.ranges.get(prop):
            out.append(_finding("MISSING-RANGE", prop, "property has no rdfs:range"))
    for term in vocab.classes | vocab.properties:
        if not _exempt(term) and not vocab.labels.get(term):
            out.append(_finding("MISSING-LABEL", term, "no rdfs:label"))
    used: set[IRI] = set()
    for sub, sup in vocab.subclass_edges:
        used.update((sub, sup))
    for targets in list(vocab.domains.values()) + list(vocab.ranges.values()):
        used.update(targets)
    for cls in vocab.classes - used:
        if not _exempt(cls):
            out.append(_finding("ORPHAN-CLASS", cls, "class is not used by any property or subclass edge"))
    return sort_findings(out)


def check_mapping_conformance(plan, vocab: Vocabulary) -> list[LintFinding]:
    """Check a mapping plan against the vocabulary.

    One finding per offending IRI (and per kind mismatch); the message lists
    the rules involved. Terms in the RDF, RDFS, OWL and XSD namespaces are
    always accepted.
    """
    undeclared_pred: dict[IRI, list[str]] = {}
    undeclared_cls: dict[IRI, list[str]] = {}
    mismatch: dict[tuple[IRI, str], list[str]] = {}
    for rule in plan.rules:
        for st in rule.statements:
            pred, obj = st.predicate, st.object
            if pred == RDF_TYPE:
                if obj.kind == "constant_iri":
                    cls = IRI(obj.value)
                    if cls not in vocab.classes and not _exempt(cls):
                        undeclared_cls.setdefault(cls, []).append(rule.name)
                continue
            if pred not in vocab.properties and not _exempt(pred):
                undeclared_pred.setdefault(pred, []).append(rule.name)
            if pred in vocab.datatype_properties and pred not in vocab.object_properties and not obj.is_literal:
                mismatch.setdefault((pred, "datatype property used with a non-literal object"), []).append(rule.name)
            if pred in vocab.object_properties and pred not in vocab.datatype_properties and obj.is_literal:
                mismatch.setdefault((pred, "object property used with a literal object"), []).append(rule.name)

    def rules(names: list[str]) -> str:
        return ", ".join(dict.fromkeys(names))

    out = [
        LintFinding("UNDECLARED-PREDICATE", "warning", p, f"predicate not declared in the ontology (rules: {rules(r)})")
        for p, r in undeclared_pred.items()
    ]
    out += [
        LintFinding("UNDECLARED-CLASS", "warning", c, f"class not declared in the ontology (rules: {rules(r)})")
        for c, r in undeclared_cls.items()
    ]
    out += [LintFinding("KIND-MISMATCH", "error", p, f"{msg} (rules: {rules(r)})") for (p, msg), r in mismatch.items()]
    return sort_findings(out)


def findings_to_json(findings: list[LintFinding]) -> str:
    return json.dumps([f.to_dict() for f in findings], indent=2, ensure_ascii=False) + "\n"


def findings_to_text(findings: list[LintFinding]) -> str:
    if not findings:
        return "no findings\n"
    lines = [f"{f.severity.upper():7} {f.code:20} {f.subject.value}  {f.message}" for f in findings]
    counts = {s: sum(1 for f in findings if f.severity == s) for s in SEVERITIES}
    lines.append(", ".join(f"{n} {s}" + ("s" if n != 1 else "") for s, n in counts.items()))
    return "\n".join(lines) + "\n"


def has_errors(findings: list[LintFinding]) -> bool:
    return any(f.severity == "error" for f in findings)
