"""Forward-chaining materialization and consistency checking.

Rules are conjunctive triple patterns with a single-triple head, or a
"bottom" head that reports an inconsistency. Evaluation is semi-naive: each
round only fires rule instances that use at least one triple derived in the
previous round.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

from .rdf import OWL, RDF_TYPE, RDFS, BlankNode, IRI, Literal, Term, Variable
from .rdf import xsd
from .store import TripleStore

RULESETS = ("none", "rdfs", "default")
MAX_ROUNDS = 10_000


@dataclass(frozen=True)
class Bottom:
    """Inconsistency marker; `message` is formatted with the rule's bindings."""

    message: str


Pattern = tuple  # (Term | Variable, Term | Variable, Term | Variable)


@dataclass(frozen=True)
class Rule:
    name: str
    body: tuple[Pattern, ...]
    head: Pattern | Bottom
    # extra test on the bound terms, used by datatype checks
    guard: Callable[[dict[str, Term]], bool] | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.body:
            raise ValueError(f"rule {self.name}: empty body")
        body_vars = {t.name for pat in self.body for t in pat if isinstance(t, Variable)}
        if not isinstance(self.head, Bottom):
            missing = {t.name for t in self.head if isinstance(t, Variable)} - body_vars
            if missing:
                raise ValueError(f"rule {self.name}: head variables {sorted(missing)} not in body")

    @property
    def is_bottom(self) -> bool:
        return isinstance(self.head, Bottom)


@dataclass
class Violation:
    rule_name: str
    bindings: dict[str, str]
    message: str

    def to_dict(self) -> dict:
        return {"rule_name": self.rule_name, "bindings": self.bindings, "message": self.message}


@dataclass
class ConsistencyReport:
    consistent: bool
    violations: list[Violation]
    entailed_triples_added: int

    def to_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "violations": [v.to_dict() for v in self.violations],
            "entailed_triples_added": self.entailed_triples_added,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------- rule sets

def _v(name: str) -> Variable:
    return Variable(name)


X, Y, Z, P, Q, C, D, E = (_v(n) for n in ("x", "y", "z", "p", "q", "c", "d", "e"))
_SUBCLASS = IRI(RDFS + "subClassOf")
_SUBPROP = IRI(RDFS + "subPropertyOf")
_DOMAIN = IRI(RDFS + "domain")
_RANGE = IRI(RDFS + "range")
_INVERSE = IRI(OWL + "inverseOf")
_SYMMETRIC = IRI(OWL + "SymmetricProperty")
_TRANSITIVE = IRI(OWL + "TransitiveProperty")
_SAME = IRI(OWL + "sameAs")
_DIFFERENT = IRI(OWL + "differentFrom")
_DISJOINT = IRI(OWL + "disjointWith")
_DATATYPE_PROPERTY = IRI(OWL + "DatatypeProperty")


RDFS_RULES = (
    Rule("cax-sco", ((X, RDF_TYPE, C), (C, _SUBCLASS, D)), (X, RDF_TYPE, D)),
    Rule("scm-sco", ((C, _SUBCLASS, D), (D, _SUBCLASS, E)), (C, _SUBCLASS, E)),
    Rule("prp-spo1", ((X, P, Y), (P, _SUBPROP, Q)), (X, Q, Y)),
    Rule("scm-spo", ((P, _SUBPROP, Q), (Q, _SUBPROP, _v("r"))), (P, _SUBPROP, _v("r"))),
    Rule("prp-dom", ((X, P, Y), (P, _DOMAIN, C)), (X, RDF_TYPE, C)),
    Rule("prp-rng", ((X, P, Y), (P, _RANGE, C)), (Y, RDF_TYPE, C)),
)

DEFAULT_RULES = RDFS_RULES + (
    Rule("prp-inv1", ((P, _INVERSE, Q), (X, P, Y)), (Y, Q, X)),
    Rule("prp-inv2", ((P, _INVERSE, Q), (X, Q, Y)), (Y, P, X)),
    Rule("prp-symp", ((P, RDF_TYPE, _SYMMETRIC), (X, P, Y)), (Y, P, X)),
    Rule("prp-trp", ((P, RDF_TYPE, _TRANSITIVE), (X, P, Y), (Y, P, Z)), (X, P, Z)),
    Rule("eq-sym", ((X, _SAME, Y),), (Y, _SAME, X)),
    Rule("eq-trans", ((X, _SAME, Y), (Y, _SAME, Z)), (X, _SAME, Z)),
    Rule(
        "cax-dw",
        ((C, _DISJOINT, D), (X, RDF_TYPE, C), (X, RDF_TYPE, D)),
        Bottom("{x} is an instance of disjoint classes {c} and {d}"),
    ),
    Rule("eq-diff1", ((X, _SAME, Y), (X, _DIFFERENT, Y)), Bottom("{x} is both owl:sameAs and owl:differentFrom {y}")),
    Rule(
        "dt-range",
        ((P, RDF_TYPE, _DATATYPE_PROPERTY), (P, _RANGE, D), (X, P, Y)),
        Bottom("value {y} of {p} on {x} is not a valid {d}"),
        guard=lambda b: type(b["y"]) is Literal and type(b["d"]) is IRI and xsd.is_known(b["d"].value)
        and not xsd.is_valid(b["y"].lexical, b["d"].value),
    ),
)


def ruleset(name: str) -> tuple[Rule, ...]:
    if name == "none":
        return ()
    if name == "rdfs":
        return RDFS_RULES
    if name == "default":
        return DEFAULT_RULES
    raise ValueError(f"unknown ruleset {name!r}; expected one of {', '.join(RULESETS)}")


def _rules(rules) -> tuple[Rule, ...]:
    return ruleset(rules) if isinstance(rules, str) else tuple(rules)


# ---------------------------------------------------------------- matching

class _Compiled:
    """A rule with constants mapped to store ids (None when a constant is unknown)."""

    def __init__(self, rule: Rule, store: TripleStore):
        self.rule = rule
        self.body = [self._ids(p, store) for p in rule.body]
        # head constants are interned so that new triples can use them
        self.head = None if rule.is_bottom else self._ids(rule.head, store, intern=True)
        self.ok = all(None not in [x for x in pat if not isinstance(x, str)] for pat in self.body)

    @staticmethod
    def _ids(pattern, store: TripleStore, intern: bool = False):
        out = []
        for t in pattern:
            if isinstance(t, Variable):
                out.append(t.name)
            else:
                out.append(store.intern(t) if intern else store.lookup(t))
        return tuple(out)


def _unify(pattern, triple, binding: dict) -> dict | None:
    out = binding
    for slot, value in zip(pattern, triple):
        if isinstance(slot, str):
            bound = out.get(slot)
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[slot] = value
            elif bound != value:
                return None
        elif slot != value:
            return None
    return out


def _bound(pattern, binding: dict) -> int:
    return sum(1 for x in pattern if not isinstance(x, str) or x in binding)


def _join(store: TripleStore, patterns: list, binding: dict):
    if not patterns:
        yield binding
        return
    # most constrained pattern first
    i = max(range(len(patterns)), key=lambda k: _bound(patterns[k], binding))
    first, rest = patterns[i], patterns[:i] + patterns[i + 1 :]
    probe = [binding.get(x) if isinstance(x, str) else x for x in first]
    for triple in store.match_ids(probe[0], probe[1], probe[2]):
        b = _unify(first, triple, binding)
        if b is not None:
            yield from _join(store, rest, b)


def _instantiate(head, binding: dict, store: TripleStore) -> tuple[int, int, int] | None:
    ids = tuple(binding[x] if isinstance(x, str) else x for x in head)
    s, p = store.term(ids[0]), store.term(ids[1])
    if type(s) not in (IRI, BlankNode) or type(p) is not IRI:
        return None
    return ids


def materialize(store: TripleStore, rules="default", target_graph: IRI | None = None) -> int:
    """Extend `store` with every entailed triple; returns how many were added.

    New triples go into `target_graph` (None: the default graph). Bottom
    rules are ignored here; see check_consistency.
    """
    rules = [r for r in _rules(rules) if not r.is_bottom]
    if not rules:
        return 0
    delta: set[tuple[int, int, int]] | None = None  # None: the whole store is new
    added = 0
    rounds = 0
    while delta is None or delta:
        rounds += 1
        if rounds > MAX_ROUNDS:
            raise RuntimeError("materialization did not reach a fixpoint within the round limit")
        new: set[tuple[int, int, int]] = set()

        def emit(c: _Compiled, bindings) -> None:
            for full in bindings:
                ids = _instantiate(c.head, full, store)
                if ids is not None and ids not in new and store.count_ids(*ids) == 0:
                    new.add(ids)

        compiled = [c for c in (_Compiled(r, store) for r in rules) if c.ok]
        if delta is None:
            # first round: one full join per rule
            for c in compiled:
                emit(c, _join(store, list(c.body), {}))
        else:
            by_predicate: dict[int, list] = {}
            for triple in delta:
                by_predicate.setdefault(triple[1], []).append(triple)
            # semi-naive: at least one body atom must match a new triple
            for c in compiled:
                for i, pattern in enumerate(c.body):
                    others = c.body[:i] + c.body[i + 1 :]
                    candidates = delta if isinstance(pattern[1], str) else by_predicate.get(pattern[1], ())
                    for triple in candidates:
                        b = _unify(pattern, triple, {})
                        if b is not None:
                            emit(c, _join(store, others, b))
        for s, p, o in sorted(new):
            store.add_ids(s, p, o, target_graph)
        added += len(new)
        delta = new
    return added


def _label(term: Term) -> str:
    return term.value if type(term) is IRI else term.n3()


def find_violations(store: TripleStore, rules="default") -> list[Violation]:
    """Evaluate the bottom rules against the store as it is (no materialization)."""
    out: list[Violation] = []
    for rule in _rules(rules):
        if not rule.is_bottom:
            continue
        c = _Compiled(rule, store)
        if not c.ok:
            continue
        seen = set()
        for b in _join(store, c.body, {}):
            key = tuple(sorted(b.items()))
            if key in seen:
                continue
            seen.add(key)
            terms = {k: store.term(v) for k, v in b.items()}
            if rule.guard is not None and not rule.guard(terms):
                continue
            text = {k: _label(v) for k, v in terms.items()}
            out.append(Violation(rule.name, {k: text[k] for k in sorted(text)}, rule.head.message.format(**text)))
    out.sort(key=lambda v: (v.rule_name, v.message, sorted(v.bindings.items())))
    return out


def check_consistency(store: TripleStore, rules="default", target_graph: IRI | None = None) -> ConsistencyReport:
    """Materialize, then report every bottom-rule match in a fixed order."""
    added = materialize(store, rules, target_graph)
    violations = find_violations(store, rules)
    return ConsistencyReport(not violations, violations, added)
