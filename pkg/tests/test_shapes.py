import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kgforge.rdf import IRI, RDF_TYPE, RDFS, XSD, Literal
from kgforge.shapes import (
    PropertyConstraint,
    QueryConstraint,
    Shape,
    ShapeError,
    check_expectation,
    parse_shapes,
    run_query_constraints,
    validate,
    wrap_cq_as_constraint,
)
from kgforge.sparql import QueryError
from kgforge.store import TripleStore

from generators import S_CLASSES as C
from generators import S_PROPS as P
from generators import random_shapes
from generators import random_shapes_store as random_store
from oracles import brute_validate

EX = "http://ex.org/"
PFX = f"""@prefix ex: <{EX}> .
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix xsd: <{XSD}> .
@prefix rdfs: <{RDFS}> .
"""


def ex(name):
    return IRI(EX + name)


def store_of(*triples):
    s = TripleStore()
    for t in triples:
        s.add(t)
    return s


def keys(report):
    return sorted((v.shape, v.focus_node, v.constraint, v.path or "", v.value or "") for v in report.violations)


# ---------------------------------------------------------------- parsing

def test_empty_shapes_graph():
    assert parse_shapes(PFX) == []


def test_one_shape_one_constraint():
    shapes = parse_shapes(PFX + "ex:S a sh:NodeShape ; sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:minCount 1 ] .")
    assert len(shapes) == 1
    s = shapes[0]
    assert s.id == EX + "S" and s.targets == [("class", ex("C"))]
    assert len(s.constraints) == 1 and s.constraints[0].param("minCount") == 1


def test_unsupported_component_named():
    with pytest.raises(ShapeError, match="sh:qualifiedValueShape"):
        parse_shapes(PFX + "ex:S sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:qualifiedValueShape ex:T ] .")
    with pytest.raises(ShapeError, match="sh:node"):
        parse_shapes(PFX + "ex:S sh:targetClass ex:C ; sh:node ex:T .")


def test_shape_without_target():
    with pytest.raises(ShapeError, match="no target"):
        parse_shapes(PFX + "ex:S a sh:NodeShape ; sh:property [ sh:path ex:p ; sh:minCount 1 ] .")


def test_min_greater_than_max():
    with pytest.raises(ShapeError, match="exceeds"):
        parse_shapes(PFX + "ex:S sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:minCount 2 ; sh:maxCount 1 ] .")


def test_parse_all_components():
    shapes = parse_shapes(
        PFX
        + """ex:S sh:targetNode ex:n ; sh:targetSubjectsOf ex:q ; sh:nodeKind sh:IRI ;
          sh:property [ sh:path [ sh:inversePath ex:p ] ; sh:class ex:C ] ;
          sh:property [ sh:path ex:v ; sh:datatype xsd:integer ; sh:minInclusive 0 ; sh:maxInclusive 10.5 ;
                        sh:in ( 1 2 3 ) ; sh:pattern "^[0-9]$" ; sh:flags "i" ; sh:nodeKind sh:Literal ] ."""
    )
    s = shapes[0]
    assert ("node", ex("n")) in s.targets and ("subjects_of", ex("q")) in s.targets
    assert s.node_constraints == [("nodeKind", "IRI")]
    inv = next(c for c in s.constraints if c.inverse)
    assert inv.path_text == "^" + EX + "p"
    v = next(c for c in s.constraints if not c.inverse)
    assert v.param("in") == (Literal("1", XSD + "integer"), Literal("2", XSD + "integer"), Literal("3", XSD + "integer"))
    assert v.param("maxInclusive") == 10.5


# ---------------------------------------------------------------- validation examples

def test_no_shapes_conforms():
    assert validate(store_of((ex("a"), ex("p"), ex("b"))), []).conforms


def test_min_count_violation_names_focus():
    shapes = parse_shapes(PFX + "ex:S sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:minCount 1 ] .")
    s = store_of((ex("a"), RDF_TYPE, ex("C")), (ex("b"), RDF_TYPE, ex("C")), (ex("b"), ex("p"), Literal("x")))
    report = validate(s, shapes)
    assert [(v.focus_node, v.constraint) for v in report.violations] == [(EX + "a", "sh:minCount")]


def test_datatype_integer_conforms():
    shapes = parse_shapes(PFX + "ex:S sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:datatype xsd:integer ] .")
    assert validate(store_of((ex("a"), ex("p"), Literal("3", XSD + "integer"))), shapes).conforms
    bad = validate(store_of((ex("a"), ex("p"), Literal("three", XSD + "integer"))), shapes)
    assert [v.message for v in bad.violations] == [f"ill-typed {XSD}integer literal"]


def test_class_constraint_uses_subclasses():
    shapes = parse_shapes(PFX + "ex:S sh:targetNode ex:a ; sh:property [ sh:path ex:p ; sh:class ex:C ] .")
    s = store_of((ex("a"), ex("p"), ex("b")), (ex("b"), RDF_TYPE, ex("D")), (ex("D"), IRI(RDFS + "subClassOf"), ex("C")))
    assert validate(s, shapes).conforms


def test_violations_sorted_and_report_formats():
    shapes = parse_shapes(PFX + "ex:S sh:targetClass ex:C ; sh:property [ sh:path ex:p ; sh:minCount 1 ] .")
    s = store_of(*[(ex(n), RDF_TYPE, ex("C")) for n in ("z", "a", "m")])
    report = validate(s, shapes)
    assert [v.focus_node for v in report.violations] == [EX + "a", EX + "m", EX + "z"]
    data = json.loads(report.to_json())
    assert data["conforms"] is False and len(data["violations"]) == 3
    assert "| shape | focus node |" in report.to_markdown()


# ---------------------------------------------------------------- random vs brute force

@pytest.mark.parametrize("seed", range(60))
def test_validate_matches_brute_force(seed):
    rng = random.Random(seed)
    triples = random_store(rng, rng.randint(0, 150))
    shapes = random_shapes(rng)
    report = validate(store_of(*triples), shapes)
    assert keys(report) == brute_validate(triples, shapes)
    assert report.conforms == (not report.violations)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**6))
def test_min_count_zero_never_violates(seed):
    rng = random.Random(seed)
    triples = random_store(rng, rng.randint(0, 80))
    shape = Shape("S", [("class", rng.choice(C)), ("subjects_of", rng.choice(P))], [PropertyConstraint(rng.choice(P), rng.random() < 0.5, (("minCount", 0),))])
    assert validate(store_of(*triples), [shape]).conforms


def test_validation_is_deterministic():
    rng = random.Random(5)
    triples = random_store(rng, 120)
    shapes = random_shapes(rng)
    assert validate(store_of(*triples), shapes).to_json() == validate(store_of(*sorted(triples, key=repr, reverse=True)), shapes).to_json()


# ---------------------------------------------------------------- query constraints

def test_wrap_ask_true():
    c = wrap_cq_as_constraint("CQ1", "ASK { ?s ?p ?o }", "ask_true")
    assert run_query_constraints(store_of((ex("a"), ex("p"), ex("b"))), [c]).conforms
    assert not run_query_constraints(TripleStore(), [c]).conforms


def test_select_nonempty_on_empty_store_fails():
    c = wrap_cq_as_constraint("CQ2", "SELECT ?s WHERE { ?s ?p ?o }", "nonempty")
    report = run_query_constraints(TripleStore(), [c])
    assert [v.shape for v in report.violations] == ["CQ2"]
    assert report.results[0].detail == "0 rows"


def test_unparseable_query_fails_at_wrap_time():
    with pytest.raises(QueryError):
        wrap_cq_as_constraint("CQ3", "SELEKT nothing", "nonempty")


def test_expectation_must_fit_form():
    with pytest.raises(ValueError, match="does not fit"):
        wrap_cq_as_constraint("CQ4", "ASK {}", "nonempty")
    with pytest.raises(ValueError, match="unknown expectation"):
        wrap_cq_as_constraint("CQ4", "ASK {}", "maybe")


def test_empty_constraint_list_conforms():
    assert run_query_constraints(TripleStore(), []).conforms


def test_two_of_three_pass():
    s = store_of((ex("a"), RDF_TYPE, ex("C")))
    cs = [
        wrap_cq_as_constraint("a", f"ASK {{ ?x a <{EX}C> }}", "ask_true"),
        wrap_cq_as_constraint("b", f"SELECT ?x WHERE {{ ?x a <{EX}D> }}", "empty"),
        wrap_cq_as_constraint("c", f"SELECT ?x WHERE {{ ?x a <{EX}D> }}", "nonempty"),
    ]
    report = run_query_constraints(s, cs)
    # oracle: evaluate each expectation directly
    assert [r.passed for r in report.results] == [True, True, False]
    assert len(report.violations) == 1 and report.violations[0].shape == "c"
    assert run_query_constraints(s, cs).to_json() == report.to_json()


def test_runtime_query_error_is_a_failure():
    report = run_query_constraints(TripleStore(), [QueryConstraint("bad", "SELECT", "nonempty")])
    assert not report.conforms and report.results[0].detail.startswith("query error")


def test_check_expectation_summaries():
    assert check_expectation(True, "ask_true") == (True, "ASK true")
    assert check_expectation(False, "ask_false") == (True, "ASK false")
