import json
import urllib.error
import urllib.parse
import urllib.request

import pytest
import yaml

from kgforge.cli import main
from kgforge.pipeline import (
    INFERRED_GRAPH,
    STAGES,
    ManifestError,
    answer,
    data_graph,
    diff_iterations,
    load_iteration_store,
    load_manifest,
    load_report,
    parse_manifest,
    run_iteration,
    serve_in_thread,
)
from kgforge.sparql import evaluate, parse_query, serialize_results


def edit_manifest(demo, **changes):
    path = demo / "manifest.yaml"
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    for key, value in changes.items():
        if value is None:
            data.pop(key, None)
        else:
            data[key] = value
    path.write_text(yaml.safe_dump(data, sort_keys=False), encoding="utf-8")
    return path


# ---------------------------------------------------------------- manifest

def test_demo_manifest_loads(demo):
    m = load_manifest(demo / "manifest.yaml", env={})
    assert m.project_name == "factory-demo" and m.ruleset == "default"
    assert [s.name for s in m.data_sources] == ["machines", "orders", "measurements"]
    assert [p.output for p in m.prep] == ["machines", "orders", "orders_full"]
    assert m.iteration_dir == demo / "output" / "iteration-1"
    assert m.snapshot()["ontology"] == "ontology.ttl"


def test_missing_csv_names_path(demo):
    (demo / "data" / "orders.csv").unlink()
    with pytest.raises(ManifestError, match="orders.csv"):
        load_manifest(demo / "manifest.yaml", env={})


def test_missing_csv_cli_exit_2_no_artifacts(demo, capsys):
    (demo / "data" / "orders.csv").unlink()
    assert main(["run", "--manifest", str(demo / "manifest.yaml")]) == 2
    assert "orders.csv" in capsys.readouterr().err
    assert not (demo / "output").exists()


@pytest.mark.parametrize(
    "data, message",
    [
        ({"project_name": "p", "colour": 1}, "unknown manifest key"),
        ({"project_name": "p", "ruleset": "owl2"}, "ruleset"),
        ({"project_name": "p", "serialization": "rdfxml"}, "serialization"),
        ({"project_name": "p", "data_sources": [{"name": "a", "path": "a.csv"}, {"name": "a", "path": "b.csv"}]}, "duplicate name 'a'"),
        ({"project_name": "p", "prep": [{"clean": {"table": "t", "ops": [{"op": "shout"}]}}]}, "unknown clean op"),
        ({"project_name": "p", "integrity_queries": [{"name": "q", "path": "q.rq", "expectation": "some"}]}, "unknown expectation"),
        ([1, 2], "must be a mapping"),
    ],
)
def test_manifest_errors(tmp_path, data, message):
    with pytest.raises(ManifestError, match=message):
        parse_manifest(data, tmp_path, env={})


def test_env_and_cli_precedence(tmp_path):
    data = {"project_name": "p", "iteration_label": "file", "ruleset": "rdfs"}
    env = {"KGF_ITERATION_LABEL": "env", "KGF_RULESET": "none", "KGF_OUTPUT_DIR": "envout"}
    m = parse_manifest(data, tmp_path, env=env)
    assert (m.iteration_label, m.ruleset, m.output_dir) == ("env", "none", tmp_path / "envout")
    m = parse_manifest(data, tmp_path, overrides={"iteration_label": "cli"}, env=env)
    assert m.iteration_label == "cli" and m.ruleset == "none"
    m = parse_manifest(data, tmp_path, env={})
    assert (m.iteration_label, m.output_dir) == ("file", tmp_path / "output")


# ---------------------------------------------------------------- runner

def test_demo_run(demo):
    m = load_manifest(demo / "manifest.yaml", env={})
    report, store = run_iteration(m, timestamp="2026-01-01T00:00:00Z", keep_store=True)
    assert [s.name for s in report.stages] == list(STAGES)
    assert all(s.status == "ok" for s in report.stages)
    assert report.overall == "pass"
    out = m.iteration_dir
    expected = (demo / "expected" / "evaluation.csv").read_text(encoding="utf-8")
    assert (out / "evaluation.csv").read_text(encoding="utf-8") == expected
    assert report.evaluation["fulfillment_rate"] == 14 / 18
    assert all(r["passed"] for r in report.integrity)
    assert len(store.graph(data_graph("assets"))) > 0 and len(store.graph(INFERRED_GRAPH)) > 0
    saved = load_report(out)
    assert saved["overall"] == "pass" and saved["timestamp"] == "2026-01-01T00:00:00Z"
    assert not list(out.parent.glob(".*.partial"))
    # every required artifact is present
    for name in ("data.nq", "inferred.nq", "ontology.ttl", "lint.json", "mapping_log.json", "integrity.json",
                 "quality.json", "quality.md", "evaluation.md", "evaluation.json", "cost_benefit.md", "manifest.json",
                 "profiles/machines.json", "prepared/orders_full.csv", "prepared/log.json"):
        assert (out / name).is_file(), name


def test_ruleset_none_without_shapes(demo):
    path = edit_manifest(demo, ruleset="none", shapes=None)
    report = run_iteration(load_manifest(path, env={}))
    q = report.quality
    assert q["level2"]["status"] == "pass" and q["level2"]["entailed_triples_added"] == 0
    assert q["level3"]["shapes"]["conforms"] is True


def test_stage_error_skips_dependents(demo):
    (demo / "mappings" / "assets.map").write_text("RULE broken\n", encoding="utf-8")
    report = run_iteration(load_manifest(demo / "manifest.yaml", env={}))
    status = {s.name: s.status for s in report.stages}
    assert status["graph_setup"] == "error"
    assert status["import"] == status["quality"] == status["evaluation"] == "skipped"
    assert status["modeling"] == "ok"
    assert report.overall == "fail"


def test_until_stops_early(demo):
    report = run_iteration(load_manifest(demo / "manifest.yaml", env={}), until="preparation")
    assert [s.name for s in report.stages] == ["understanding", "preparation"]
    with pytest.raises(ValueError):
        run_iteration(load_manifest(demo / "manifest.yaml", env={}), until="deploy")


def test_turtle_serialization(demo):
    path = edit_manifest(demo, serialization="turtle")
    m = load_manifest(path, env={})
    report = run_iteration(m)
    assert report.overall == "pass"
    assert sorted(p.name for p in (m.iteration_dir / "data").iterdir()) == ["assets.ttl", "production.ttl"]
    assert len(load_iteration_store(m.iteration_dir)) > 0


# ---------------------------------------------------------------- diff

def test_identical_reports_empty_diff(demo):
    m = load_manifest(demo / "manifest.yaml", env={})
    run_iteration(m)
    report = load_report(m.iteration_dir)
    d = diff_iterations(report, report)
    assert d.empty and d.to_text() == "no changes\n"


def test_triple_count_delta():
    assert diff_iterations({"triple_count": 100}, {"triple_count": 120}).triple_count_delta == 20


def test_newly_passing_rate_delta():
    rows = lambda ratings: [{"sub_question_id": k, "rating": v} for k, v in ratings.items()]
    a = {"evaluation": {"fulfillment_rate": 1 / 4, "rows": rows({"a": "pass", "b": "fail", "c": "fail", "d": "fail"})}}
    b = {"evaluation": {"fulfillment_rate": 2 / 4, "rows": rows({"a": "pass", "b": "pass", "c": "fail", "d": "fail"})}}
    d = diff_iterations(a, b)
    assert d.newly_passing == ["b"] and d.newly_failing == []
    assert d.fulfillment_rate_delta == pytest.approx(1 / 4)


def test_violation_diff():
    q = lambda vs: {"quality": {"level3": {"shapes": {"violations": vs}}}}
    v1 = {"shape": "S", "focus_node": "a", "constraint": "sh:minCount", "path": "p"}
    v2 = {"shape": "S", "focus_node": "b", "constraint": "sh:minCount", "path": "p"}
    d = diff_iterations(q([v1]), q([v2]))
    assert d.new_violations == ["level3 S b sh:minCount p"] and d.resolved_violations == ["level3 S a sh:minCount p"]


def test_cli_diff(demo, capsys):
    m = load_manifest(demo / "manifest.yaml", env={})
    run_iteration(m)
    assert main(["diff", str(m.iteration_dir), str(m.iteration_dir)]) == 0
    assert capsys.readouterr().out == "no changes\n"
    assert main(["diff", str(m.iteration_dir)]) == 2


# ---------------------------------------------------------------- server

@pytest.fixture
def endpoint(demo):
    m = load_manifest(demo / "manifest.yaml", env={})
    run_iteration(m)
    store = load_iteration_store(m.iteration_dir)
    server, thread = serve_in_thread(store)
    host, port = server.server_address[:2]
    yield store, f"http://{host}:{port}"
    server.shutdown()
    server.server_close()


def request(url, data=None, ctype=None, method=None):
    req = urllib.request.Request(url, data=data, method=method)
    if ctype:
        req.add_header("Content-Type", ctype)
    try:
        with urllib.request.urlopen(req, timeout=10) as resp:
            return resp.status, resp.headers.get("Content-Type"), resp.read().decode("utf-8")
    except urllib.error.HTTPError as exc:
        return exc.code, exc.headers.get("Content-Type"), exc.read().decode("utf-8")


def test_get_ask(endpoint):
    _, base = endpoint
    status, ctype, body = request(base + "/sparql?query=" + urllib.parse.quote("ASK{}"))
    assert status == 200 and "sparql-results+json" in ctype
    assert json.loads(body) == {"head": {}, "boolean": True}


def test_post_select_matches_in_process(endpoint):
    store, base = endpoint
    q = "SELECT ?m ?l WHERE { ?m a <http://example.org/factory#Machine> ; <http://www.w3.org/2000/01/rdf-schema#label> ?l } ORDER BY ?m"
    status, _, body = request(base + "/sparql", q.encode(), "application/sparql-query")
    assert status == 200
    assert json.loads(body) == json.loads(serialize_results(evaluate(parse_query(q), store), "sparql-json"))
    form = urllib.parse.urlencode({"query": q}).encode()
    assert request(base + "/", form, "application/x-www-form-urlencoded")[2] == body


def test_construct_returns_turtle(endpoint):
    _, base = endpoint
    q = "CONSTRUCT { ?m a <urn:x> } WHERE { ?m a <http://example.org/factory#Lathe> }"
    status, ctype, body = request(base + "/sparql?query=" + urllib.parse.quote(q))
    assert status == 200 and ctype.startswith("text/turtle") and "urn:x" in body


def test_malformed_and_missing_query(endpoint):
    _, base = endpoint
    assert request(base + "/sparql", b"SELEKT", "application/sparql-query")[0] == 400
    assert request(base + "/sparql")[0] == 400
    assert request(base + "/other?query=ASK{}")[0] == 404
    assert request(base + "/sparql", b"ASK{}", "text/plain")[0] == 415


def test_updates_rejected(endpoint):
    store, base = endpoint
    before = store.stats()
    for method in ("PUT", "DELETE", "PATCH"):
        assert request(base + "/sparql", b"x", "text/turtle", method)[0] == 405
    assert request(base + "/sparql", b"INSERT DATA { <a> <b> <c> }", "application/sparql-update")[0] == 405
    assert request(base + "/sparql", urllib.parse.urlencode({"update": "CLEAR ALL"}).encode(), "application/x-www-form-urlencoded")[0] == 405
    assert request(base + "/sparql?update=CLEAR%20ALL")[0] == 405
    for i in range(30):
        request(base + "/sparql?query=" + urllib.parse.quote(f"SELECT * WHERE {{ ?s ?p ?o }} LIMIT {i}"))
    assert store.stats() == before


def test_answer_helper_on_empty_store():
    from kgforge.store import TripleStore

    assert answer(TripleStore(), "ASK {}")[:2] == (200, "application/sparql-results+json")
    assert answer(TripleStore(), "nonsense")[0] == 400


# ---------------------------------------------------------------- CLI

def test_cli_run_and_out_override(demo, tmp_path, capsys):
    out = tmp_path / "elsewhere"
    assert main(["run", "--manifest", str(demo / "manifest.yaml"), "--out", str(out), "--iteration", "it-9"]) == 0
    text = capsys.readouterr().out
    assert "overall: pass" in text
    assert (out / "it-9" / "evaluation.csv").is_file()


def test_cli_subcommands_stop_at_their_stage(demo, capsys):
    assert main(["prep", "--manifest", str(demo / "manifest.yaml")]) == 0
    report = load_report(demo / "output" / "iteration-1")
    assert [s["name"] for s in report["stages"]] == ["understanding", "preparation"]


def test_cli_quality_failure_exit_1(demo):
    csv = demo / "data" / "machines.csv"
    lines = csv.read_text(encoding="utf-8").splitlines()
    header = lines[0].split(",")
    for i, line in enumerate(lines[1:], 1):
        if line.startswith("M3,"):
            cells = line.split(",")
            cells[header.index("name")] = ""
            lines[i] = ",".join(cells)
    csv.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert main(["quality", "--manifest", str(demo / "manifest.yaml")]) == 1


def test_cli_profile_and_lint_files(demo, capsys):
    assert main(["profile", str(demo / "data" / "machines.csv"), "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["table"] == "machines"
    assert main(["lint", str(demo / "ontology.ttl")]) == 0
    assert capsys.readouterr().out == "no findings\n"
    bad = demo / "bad.ttl"
    bad.write_text("@prefix ex: <http://ex.org/> .\nex:A <http://www.w3.org/2000/01/rdf-schema#subClassOf> ex:B .\nex:B <http://www.w3.org/2000/01/rdf-schema#subClassOf> ex:A .\n", encoding="utf-8")
    assert main(["lint", str(bad)]) == 1
    assert main(["profile", str(demo / "nope.csv")]) == 2


def test_cli_requires_manifest(capsys):
    assert main(["run"]) == 2
    assert "--manifest" in capsys.readouterr().err


def test_cli_env_override(demo, monkeypatch):
    monkeypatch.setenv("KGF_ITERATION_LABEL", "from-env")
    assert main(["load", "--manifest", str(demo / "manifest.yaml")]) == 0
    assert (demo / "output" / "from-env" / "integrity.json").is_file()
