"""Three-level knowledge graph quality check.

Level 1 checks the syntax of every RDF input, level 2 materializes entailments
and searches for logical inconsistencies, level 3 validates shapes and
competency-query constraints on the materialized store. The report also
fills six quality dimensions, measured where the checks allow it and marked
manual otherwise.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .inference import ConsistencyReport, check_consistency
from .rdf import IRI, SyntaxReport, validate_syntax
from .rdf.syntax import SyntaxError_
from .shapes import QueryConstraint, Shape, ValidationReport, focus_nodes, run_query_constraints, validate
from .store import TripleStore

DIMENSIONS = ("accuracy", "completeness", "consistency", "timeliness", "trustworthiness", "availability")
LEVELS = ("level1", "level2", "level3")


@dataclass
class Dimension:
    status: str  # measured | manual | n/a
    evidence: str

    def to_dict(self) -> dict:
        return {"status": self.status, "evidence": self.evidence}


@dataclass
class QualityReport:
    level1: list[SyntaxReport]
    level2: ConsistencyReport
    level3_shapes: ValidationReport
    level3_queries: ValidationReport
    # inputs to the measurable dimensions
    min_count_coverage: tuple[int, int] = (0, 0)
    faultlessness: dict[str, float] | None = None
    fulfillment: float | None = None

    @property
    def dimensions(self) -> dict[str, Dimension]:
        return _dimensions(self)

    def level_passed(self, level: str) -> bool:
        if level == "level1":
            return all(r.ok for r in self.level1)
        if level == "level2":
            return self.level2.consistent
        if level == "level3":
            return self.level3_shapes.conforms and self.level3_queries.conforms
        raise ValueError(level)

    def to_dict(self) -> dict:
        return {
            "overall": overall_status(self),
            "level1": {
                "status": _word(self.level_passed("level1")),
                "files": [r.to_dict() for r in self.level1],
            },
            "level2": {"status": _word(self.level_passed("level2")), **self.level2.to_dict()},
            "level3": {
                "status": _word(self.level_passed("level3")),
                "shapes": self.level3_shapes.to_dict(),
                "queries": self.level3_queries.to_dict(),
            },
            "dimensions": {name: self.dimensions[name].to_dict() for name in DIMENSIONS},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_markdown(self) -> str:
        lines = ["# Quality report", "", f"overall: **{overall_status(self)}**", ""]
        lines += ["| level | check | status |", "|---|---|---|"]
        lines.append(f"| 1 | syntax of {len(self.level1)} RDF files | {_word(self.level_passed('level1'))} |")
        lines.append(f"| 2 | logical consistency | {_word(self.level_passed('level2'))} |")
        lines.append(f"| 3 | shapes and query constraints | {_word(self.level_passed('level3'))} |")
        bad = [r for r in self.level1 if not r.ok]
        if bad:
            lines += ["", "## Level 1: syntax errors", ""]
            for r in bad:
                for e in r.errors:
                    lines.append(f"- `{r.path}` line {e.line}, column {e.column}: {e.message}")
        if self.level2.violations:
            lines += ["", "## Level 2: inconsistencies", ""]
            lines += [f"- {v.rule_name}: {v.message}" for v in self.level2.violations]
        if not self.level3_shapes.conforms:
            lines += ["", "## Level 3: shape violations", ""]
            for v in self.level3_shapes.violations:
                where = f" path {v.path}" if v.path else ""
                lines.append(f"- {v.shape} on {v.focus_node}{where}: {v.constraint}: {v.message}")
        if self.level3_queries.results:
            lines += ["", "## Level 3: query constraints", ""]
            lines += [f"- {r.name}: {'pass' if r.passed else 'fail'} ({r.detail})" for r in self.level3_queries.results]
        lines += ["", "## Quality dimensions", "", "| dimension | status | evidence |", "|---|---|---|"]
        for name in DIMENSIONS:
            d = self.dimensions[name]
            lines.append(f"| {name} | {d.status} | {d.evidence} |")
        return "\n".join(lines) + "\n"


def _word(ok: bool) -> str:
    return "pass" if ok else "fail"


def overall_status(report: QualityReport) -> str:
    """fail iff any level-1 error, level-2 violation or level-3 violation."""
    return "pass" if all(report.level_passed(level) for level in LEVELS) else "fail"


def _min_count_coverage(store: TripleStore, shapes: list[Shape], report: ValidationReport) -> tuple[int, int]:
    total = 0
    for shape in shapes:
        n = sum(1 for c in shape.constraints if c.param("minCount"))
        if n:
            total += n * len(focus_nodes(store, shape))
    missing = sum(1 for v in report.violations if v.constraint == "sh:minCount")
    return total - missing, total


def _dimensions(report: QualityReport) -> dict[str, Dimension]:
    dims: dict[str, Dimension] = {}
    if report.faultlessness:
        text = "; ".join(f"{name} faultlessness {score:.4f}" for name, score in sorted(report.faultlessness.items()))
        dims["accuracy"] = Dimension("measured", text)
    else:
        dims["accuracy"] = Dimension("manual", "no data-preparation profiles available")
    parts = []
    covered, total = report.min_count_coverage
    if total:
        parts.append(f"minCount coverage {covered}/{total}")
    if report.fulfillment is not None:
        parts.append(f"CQ fulfillment {report.fulfillment:.4f}")
    if parts:
        dims["completeness"] = Dimension("measured", "; ".join(parts))
    else:
        dims["completeness"] = Dimension("n/a", "no minCount shapes and no CQ evaluation")
    if report.level2.consistent:
        dims["consistency"] = Dimension("measured", "consistent")
    else:
        dims["consistency"] = Dimension("measured", f"inconsistent: {len(report.level2.violations)} violations")
    dims["timeliness"] = Dimension("manual", "data currency must be judged against the source systems")
    dims["trustworthiness"] = Dimension("manual", "source provenance and reliability must be reviewed by domain experts")
    dims["availability"] = Dimension("manual", "endpoint availability is an operational concern outside an offline run")
    return dims


def run_quality_checks(
    rdf_inputs: list[str | Path],
    store: TripleStore,
    ruleset="default",
    shapes: list[Shape] | None = None,
    query_constraints: list[QueryConstraint] | None = None,
    inferred_graph: IRI | None = None,
    faultlessness: dict[str, float] | None = None,
    fulfillment: float | None = None,
) -> QualityReport:
    """Run the three levels in order. Failures are report content, never exceptions.

    Level 2 adds entailed triples to `inferred_graph` of the store; level 3
    therefore sees the materialized graph.
    """
    level1 = []
    for path in rdf_inputs:
        try:
            level1.append(validate_syntax(path))
        except (OSError, ValueError) as exc:
            level1.append(SyntaxReport(False, [SyntaxError_(0, 0, str(exc))], 0, str(path)))
    level2 = check_consistency(store, ruleset, inferred_graph)
    shapes = shapes or []
    level3_shapes = validate(store, shapes)
    level3_queries = run_query_constraints(store, query_constraints or [])
    coverage = _min_count_coverage(store, shapes, level3_shapes)
    return QualityReport(level1, level2, level3_shapes, level3_queries, coverage, faultlessness, fulfillment)
