import copy
import json

from hypothesis import given, settings
from hypothesis import strategies as st

from kgforge.inference import ConsistencyReport, Violation
from kgforge.quality import DIMENSIONS, LEVELS, QualityReport, overall_status, run_quality_checks
from kgforge.rdf import IRI, SyntaxReport, parse_turtle
from kgforge.rdf.syntax import SyntaxError_
from kgforge.shapes import ShapeViolation, ValidationReport, parse_shapes, wrap_cq_as_constraint
from kgforge.store import TripleStore

ONTOLOGY = """@prefix ex: <http://ex.org/> .
@prefix owl: <http://www.w3.org/2002/07/owl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:Machine a owl:Class ; rdfs:label "Machine" .
ex:Lathe a owl:Class ; rdfs:subClassOf ex:Machine ; rdfs:label "Lathe" .
ex:Plant a owl:Class ; owl:disjointWith ex:Machine ; rdfs:label "Plant" .
"""
DATA = """@prefix ex: <http://ex.org/> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:m1 a ex:Lathe ; rdfs:label "M1" .
ex:m2 a ex:Machine ; rdfs:label "M2" .
ex:p1 a ex:Plant ; rdfs:label "P1" .
"""
SHAPES = """@prefix ex: <http://ex.org/> .
@prefix sh: <http://www.w3.org/ns/shacl#> .
@prefix rdfs: <http://www.w3.org/2000/01/rdf-schema#> .
ex:MachineShape sh:targetClass ex:Machine ;
  sh:property [ sh:path rdfs:label ; sh:minCount 1 ; sh:maxCount 1 ] .
"""


def project(tmp_path, data=DATA):
    files = {"ontology.ttl": ONTOLOGY, "data.ttl": data, "shapes.ttl": SHAPES}
    paths = []
    for name, text in files.items():
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        paths.append(p)
    store = TripleStore()
    for text in (ONTOLOGY, data):
        for t in parse_turtle(text):
            store.add(t)
    return paths, store


def test_empty_store_vacuous_pass():
    report = run_quality_checks([], TripleStore())
    assert [report.level_passed(level) for level in LEVELS] == [True, True, True]
    assert overall_status(report) == "pass"
    assert report.level2.consistent and report.level3_shapes.conforms and report.level3_queries.conforms


def test_clean_fixture_passes(tmp_path):
    paths, store = project(tmp_path)
    shapes = parse_shapes(SHAPES)
    cq = wrap_cq_as_constraint("machines", "ASK { ?m a <http://ex.org/Machine> }", "ask_true")
    report = run_quality_checks(paths, store, "default", shapes, [cq], IRI("urn:inferred"))
    assert overall_status(report) == "pass"
    dims = report.dimensions
    assert dims["consistency"].status == "measured" and dims["consistency"].evidence == "consistent"
    # m1 is a Machine only after materialization
    assert dims["completeness"].evidence == "minCount coverage 2/2"
    assert (IRI("http://ex.org/m1"), IRI("http://www.w3.org/1999/02/22-rdf-syntax-ns#type"), IRI("http://ex.org/Machine")) in store


def test_disjointness_clash_fails_level2(tmp_path):
    paths, store = project(tmp_path, DATA + "ex:m1 a ex:Plant .\n")
    report = run_quality_checks(paths, store, "default", parse_shapes(SHAPES))
    assert not report.level_passed("level2") and report.level_passed("level1")
    assert overall_status(report) == "fail"
    assert report.dimensions["consistency"].evidence == "inconsistent: 1 violations"
    assert report.level2.violations[0].bindings["x"] == "http://ex.org/m1"


def test_syntax_error_fails_level1(tmp_path):
    paths, store = project(tmp_path)
    paths[1].write_text(DATA + "ex:broken a .\n", encoding="utf-8")
    report = run_quality_checks(paths, store)
    assert not report.level_passed("level1")
    bad = [r for r in report.level1 if not r.ok]
    assert len(bad) == 1 and bad[0].errors[0].line == 6


def test_missing_file_is_level1_content(tmp_path):
    report = run_quality_checks([tmp_path / "nope.ttl"], TripleStore())
    assert not report.level_passed("level1") and overall_status(report) == "fail"


def test_shape_violation_fails_level3(tmp_path):
    paths, store = project(tmp_path, DATA.replace('ex:m2 a ex:Machine ; rdfs:label "M2" .', "ex:m2 a ex:Machine ."))
    report = run_quality_checks(paths, store, "default", parse_shapes(SHAPES))
    assert [report.level_passed(level) for level in LEVELS] == [True, True, False]
    v = report.level3_shapes.violations[0]
    assert (v.focus_node, v.constraint) == ("http://ex.org/m2", "sh:minCount")
    assert report.dimensions["completeness"].evidence == "minCount coverage 1/2"


def test_six_dimensions_always(tmp_path):
    paths, store = project(tmp_path)
    for kwargs in ({}, {"faultlessness": {"t": 0.5}, "fulfillment": 0.25}):
        report = run_quality_checks(paths, store, "default", **kwargs)
        data = report.to_dict()
        assert tuple(data["dimensions"]) == DIMENSIONS
        assert set(LEVELS) <= set(data)
        for name in ("timeliness", "trustworthiness", "availability"):
            assert data["dimensions"][name]["status"] == "manual"
    assert data["dimensions"]["accuracy"] == {"status": "measured", "evidence": "t faultlessness 0.5000"}
    assert data["dimensions"]["completeness"]["evidence"] == "CQ fulfillment 0.2500"
    assert "| accuracy | measured |" in report.to_markdown()


def test_rerun_is_identical(tmp_path):
    # level 2 writes into the store, so each run starts from a freshly built one
    paths, store = project(tmp_path)
    a = run_quality_checks(paths, store, "default", parse_shapes(SHAPES), inferred_graph=IRI("urn:i"))
    paths, store = project(tmp_path)
    b = run_quality_checks(paths, store, "default", parse_shapes(SHAPES), inferred_graph=IRI("urn:i"))
    assert a.to_json() == b.to_json()
    assert json.loads(a.to_json())["overall"] == "pass"


# ---------------------------------------------------------------- overall_status

def bare_report():
    return QualityReport([], ConsistencyReport(True, [], 0), ValidationReport(), ValidationReport())


def add_violation(report, kind):
    if kind == 0:
        report.level1.append(SyntaxReport(False, [SyntaxError_(1, 1, "bad")], 0, "x.ttl"))
    elif kind == 1:
        report.level2 = ConsistencyReport(False, report.level2.violations + [Violation("cax-dw", {"x": "a"}, "clash")], 0)
    elif kind == 2:
        report.level3_shapes = ValidationReport(report.level3_shapes.violations + [ShapeViolation("a", "S", "sh:minCount", "m")])
    else:
        report.level3_queries = ValidationReport(report.level3_queries.violations + [ShapeViolation("", "Q", "query", "m")])


def test_all_empty_passes_and_single_violation_fails():
    assert overall_status(bare_report()) == "pass"
    for kind in range(4):
        r = bare_report()
        add_violation(r, kind)
        assert overall_status(r) == "fail"


@settings(max_examples=60)
@given(st.lists(st.integers(0, 3), max_size=6), st.integers(0, 3))
def test_overall_status_monotone(kinds, extra):
    r = bare_report()
    for k in kinds:
        add_violation(r, k)
    before = overall_status(r)
    r2 = copy.deepcopy(r)
    add_violation(r2, extra)
    assert overall_status(r2) == "fail"
    assert not (before == "fail" and overall_status(r2) == "pass")
