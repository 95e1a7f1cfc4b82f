"""Iteration runner: every stage of one construction iteration, in order.

Artifacts are written to a scratch directory next to the iteration
directory and moved into place when the run finishes, so a crashed run
never leaves a half-written iteration behind.
"""

from __future__ import annotations

import json
import shutil
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from ..backlog import BacklogError, build_cost_benefit, evaluate_backlog, load_backlog, render_table
from ..dataprep import DataPrepError, Table, clean, denormalize, ingest_csv, profile, write_csv
from ..inference import ruleset as get_ruleset
from ..mapping import MappingError, MappingLog, apply_mapping, compile_mapping
from ..mapping.plan import DEFAULT_PREFIXES
from ..ontology import check_mapping_conformance, extract_vocabulary, lint, sort_findings
from ..quality import overall_status, run_quality_checks
from ..rdf import IRI, Dataset, Graph, RDFSyntaxError, parse_file, serialize
from ..shapes import ShapeError, parse_shapes, run_query_constraints, wrap_cq_as_constraint
from ..sparql import QueryError
from ..store import TripleStore
from .manifest import ProjectManifest

STAGES = ("understanding", "preparation", "modeling", "graph_setup", "import", "quality", "evaluation")
# stages whose failure prevents a later stage from running
DEPENDS = {
    "understanding": (),
    "preparation": ("understanding",),
    "modeling": (),
    "graph_setup": ("preparation",),
    "import": ("graph_setup",),
    "quality": ("import",),
    "evaluation": ("import",),
}
ONTOLOGY_GRAPH = IRI("urn:kgforge:ontology")
INFERRED_GRAPH = IRI("urn:kgforge:inferred")
DATA_GRAPH_PREFIX = "urn:kgforge:data:"
STAGE_ERRORS = (
    BacklogError, DataPrepError, MappingError, QueryError, RDFSyntaxError, ShapeError, OSError, ValueError,
)


def data_graph(mapping_name: str) -> IRI:
    return IRI(DATA_GRAPH_PREFIX + mapping_name)


@dataclass
class StageRecord:
    name: str
    status: str  # ok | error | skipped
    seconds: float = 0.0
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "seconds": round(self.seconds, 6), "detail": self.detail}


@dataclass
class IterationReport:
    manifest: dict
    iteration_dir: Path
    timestamp: str
    stages: list[StageRecord] = field(default_factory=list)
    profiles: dict[str, dict] = field(default_factory=dict)
    prep_log: list[dict] = field(default_factory=list)
    vocabulary: dict = field(default_factory=dict)
    lint_findings: list[dict] = field(default_factory=list)
    mapping_logs: dict[str, dict] = field(default_factory=dict)
    triple_count: int = 0
    integrity: list[dict] = field(default_factory=list)
    quality: dict | None = None
    evaluation: dict | None = None
    cost_benefit: dict | None = None

    def stage(self, name: str) -> StageRecord | None:
        for s in self.stages:
            if s.name == name:
                return s
        return None

    @property
    def overall(self) -> str:
        if any(s.status == "error" for s in self.stages):
            return "fail"
        if self.quality is not None and self.quality["overall"] != "pass":
            return "fail"
        return "pass"

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "timestamp": self.timestamp,
            "manifest": self.manifest,
            "stages": [s.to_dict() for s in self.stages],
            "profiles": self.profiles,
            "prep_log": self.prep_log,
            "vocabulary": self.vocabulary,
            "lint_findings": self.lint_findings,
            "mapping_logs": self.mapping_logs,
            "triple_count": self.triple_count,
            "integrity": self.integrity,
            "quality": self.quality,
            "evaluation": self.evaluation,
            "cost_benefit": self.cost_benefit,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"


class _Run:
    def __init__(self, manifest: ProjectManifest, out: Path, report: IterationReport):
        self.m = manifest
        self.out = out
        self.report = report
        self.tables: dict[str, Table] = {}
        self.prepared: dict[str, Table] = {}
        self.ontology: Graph | None = None
        self.vocab = None
        self.data: dict[str, Graph] = {}
        self.prefixes: dict[str, str] = dict(DEFAULT_PREFIXES)
        self.data_files: list[Path] = []
        self.store: TripleStore | None = None
        self.constraints = []
        self.faultlessness: dict[str, float] = {}
        self.quality_report = None

    def write(self, rel: str, text: str) -> Path:
        path = self.out / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
        return path

    # -- data understanding
    def understanding(self):
        for src in self.m.data_sources:
            table = ingest_csv(src.path, src.options, src.name, src.types)
            self.tables[src.name] = table
            prof = profile(table)
            self.report.profiles[src.name] = prof.to_dict()
            self.write(f"profiles/{src.name}.json", prof.to_json())
            self.write(f"profiles/{src.name}.md", prof.to_markdown())
        return f"{len(self.tables)} tables ingested"

    # -- data preparation
    def preparation(self):
        tables = {name: t for name, t in self.tables.items()}
        for i, step in enumerate(self.m.prep):
            if step.kind == "clean":
                if step.table not in tables:
                    raise DataPrepError(f"prep[{i}]: unknown table '{step.table}'")
                result = clean(tables[step.table], step.ops)
                tables[step.table] = result.table
                self.report.prep_log.append({"step": i, "clean": step.table, "log": result.to_dict()["log"]})
            else:
                joined = denormalize(tables, step.join)
                tables[step.output] = joined
                self.report.prep_log.append({"step": i, "join": step.output, "rows": len(joined)})
        self.prepared = tables
        (self.out / "prepared").mkdir(parents=True, exist_ok=True)
        for name, table in tables.items():
            write_csv(table, self.out / "prepared" / f"{name}.csv")
            prof = profile(table)
            self.faultlessness[name] = prof.score("faultlessness")
        self.write("prepared/log.json", json.dumps(self.report.prep_log, indent=2, ensure_ascii=False) + "\n")
        return f"{len(tables)} tables prepared"

    # -- modeling
    def modeling(self):
        if self.m.ontology is None:
            return "no ontology configured"
        graph = parse_file(self.m.ontology)
        if isinstance(graph, Dataset):
            graph = graph.default_graph
        self.ontology = graph
        self.vocab = extract_vocabulary(graph)
        self.report.vocabulary = self.vocab.summary()
        findings = lint(self.vocab)
        self.report.lint_findings = [f.to_dict() for f in findings]
        return f"{len(graph)} ontology triples, {len(findings)} lint findings"

    # -- graph setup
    def graph_setup(self):
        log_total = MappingLog()
        conformance = []
        for path in self.m.mappings:
            plan = compile_mapping(path.read_text(encoding="utf-8"))
            for k, v in plan.prefixes.items():
                self.prefixes.setdefault(k, v)
            if self.vocab is not None:
                conformance += check_mapping_conformance(plan, self.vocab)
            graph, log = apply_mapping(plan, self.prepared)
            self.data[path.stem] = graph
            self.report.mapping_logs[path.stem] = log.to_dict()
            log_total.merge(log)
        if conformance:
            self.report.lint_findings += [f.to_dict() for f in sort_findings(conformance)]
        self.write("lint.json", json.dumps(self.report.lint_findings, indent=2, ensure_ascii=False) + "\n")
        if self.m.serialization == "nquads":
            ds = Dataset(named_graphs={data_graph(name): g for name, g in self.data.items()})
            self.data_files.append(self.write("data.nq", serialize(ds, "nquads")))
        else:
            for name, g in self.data.items():
                self.data_files.append(self.write(f"data/{name}.ttl", serialize(g, "turtle", self.prefixes)))
        if self.ontology is not None:
            self.write("ontology.ttl", serialize(self.ontology, "turtle", self.prefixes))
        self.write("mapping_log.json", json.dumps(self.report.mapping_logs, indent=2, ensure_ascii=False) + "\n")
        return f"{log_total.graph_size} triples from {len(self.m.mappings)} mappings"

    # -- import + integrity queries
    def import_(self):
        store = TripleStore()
        for name, g in self.data.items():
            store.import_(g, data_graph(name))
        if self.ontology is not None:
            store.import_(self.ontology, ONTOLOGY_GRAPH)
        self.store = store
        self.report.triple_count = len(store)
        self.constraints = [
            wrap_cq_as_constraint(q.name, q.path.read_text(encoding="utf-8"), q.expectation)
            for q in self.m.integrity_queries
        ]
        results = run_query_constraints(store, self.constraints).results
        self.report.integrity = [r.to_dict() for r in results]
        self.write("integrity.json", json.dumps(self.report.integrity, indent=2, ensure_ascii=False) + "\n")
        failed = sum(1 for r in results if not r.passed)
        return f"{len(store)} triples loaded, {failed} of {len(results)} integrity queries failed"

    # -- quality (levels 1-3); materializes into the inferred graph
    def quality(self):
        shapes = []
        if self.m.shapes is not None:
            try:
                shapes = parse_shapes(self.m.shapes.read_text(encoding="utf-8"))
            except RDFSyntaxError:
                pass  # reported by level 1
        inputs = [p for p in (self.m.ontology, self.m.shapes) if p is not None] + self.data_files
        report = run_quality_checks(
            inputs, self.store, get_ruleset(self.m.ruleset), shapes, self.constraints,
            INFERRED_GRAPH, self.faultlessness or None,
        )
        self.quality_report = report
        inferred = self.store.graph(INFERRED_GRAPH)
        self.write("inferred.nq", serialize(inferred, "nquads", graph_name=INFERRED_GRAPH))
        self.write_quality()
        return f"overall {overall_status(report)}"

    def write_quality(self):
        q = self.quality_report
        self.report.quality = q.to_dict()
        self.write("quality.json", q.to_json())
        self.write("quality.md", q.to_markdown())

    # -- evaluation
    def evaluation(self):
        if self.m.backlog is None:
            return "no backlog configured"
        backlog = load_backlog(self.m.backlog)
        table = evaluate_backlog(backlog, self.store, self.m.iteration_label, self.report.timestamp)
        self.report.evaluation = table.to_dict()
        self.write("evaluation.csv", render_table(table, "csv"))
        self.write("evaluation.md", render_table(table, "markdown"))
        self.write("evaluation.json", render_table(table, "json"))
        matrix = build_cost_benefit(backlog)
        self.report.cost_benefit = matrix.to_dict()
        self.write("cost_benefit.md", matrix.to_markdown())
        if self.quality_report is not None:
            # completeness also reflects CQ fulfillment
            self.quality_report.fulfillment = table.fulfillment_rate
            self.write_quality()
        return f"fulfillment rate {table.fulfillment_rate:.4f} ({table.passed}/{table.evaluable})"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def run_iteration(
    manifest: ProjectManifest, until: str = "evaluation", timestamp: str | None = None, keep_store: bool = False
):
    """Run stages in order up to and including `until`; returns the report.

    With keep_store the final TripleStore is returned as well:
    (report, store).
    """
    if until not in STAGES:
        raise ValueError(f"unknown stage {until!r}; expected one of {', '.join(STAGES)}")
    final = manifest.iteration_dir
    scratch = final.parent / f".{final.name}.partial"
    if scratch.exists():
        shutil.rmtree(scratch)
    scratch.mkdir(parents=True)
    report = IterationReport(manifest.snapshot(), final, timestamp or _now())
    run = _Run(manifest, scratch, report)
    failed: set[str] = set()
    try:
        for name in STAGES[: STAGES.index(until) + 1]:
            blockers = [d for d in DEPENDS[name] if d in failed]
            if blockers:
                failed.add(name)
                report.stages.append(StageRecord(name, "skipped", 0.0, f"depends on failed stage {blockers[0]}"))
                continue
            start = time.perf_counter()
            try:
                detail = getattr(run, "import_" if name == "import" else name)()
                status = "ok"
            except STAGE_ERRORS as exc:
                failed.add(name)
                status, detail = "error", f"{type(exc).__name__}: {exc}"
            report.stages.append(StageRecord(name, status, time.perf_counter() - start, detail))
        run.write("report.json", report.to_json())
        run.write("manifest.json", json.dumps(report.manifest, indent=2, ensure_ascii=False) + "\n")
        if final.exists():
            shutil.rmtree(final)
        scratch.rename(final)
    finally:
        if scratch.exists():
            shutil.rmtree(scratch)
    return (report, run.store) if keep_store else report


def load_iteration_store(iteration_dir: str | Path) -> TripleStore:
    """Rebuild the store of a finished iteration from its RDF artifacts."""
    root = Path(iteration_dir)
    store = TripleStore()
    found = False
    for path in sorted(root.glob("*.nq")):
        store.import_(parse_file(path))
        found = True
    for path in sorted((root / "data").glob("*.ttl")):
        store.import_(parse_file(path), data_graph(path.stem))
        found = True
    if (root / "ontology.ttl").is_file():
        store.import_(parse_file(root / "ontology.ttl"), ONTOLOGY_GRAPH)
        found = True
    if not found:
        raise FileNotFoundError(f"no RDF artifacts in {root}")
    return store
