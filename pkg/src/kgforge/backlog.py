"""Competency-question backlog, evaluation table and cost-benefit matrix.

Backlog files are YAML::

    questions:
      - id: CQ1
        text: Which machines produced scrap last week?
        cluster: production
        priority: 1            # 1 = highest
        kind: cq               # or business_question (needs a note)
        status: open           # open | in_progress | answered | blocked
        cost: low              # low | medium | high (optional)
        benefit: high          # optional
        note: free text
        sub_questions:
          - id: CQ1.1
            text: Which machines exist?
            expectation: nonempty   # nonempty | empty | ask_true | ask_false | manual
            query: |
              SELECT ?m WHERE { ?m a ex:Machine }
            rating: pass            # optional manual entry
            notes: free text

An optional top-level ``prefixes`` mapping is prepended to every query as
PREFIX declarations. A bare list of questions is accepted too. Ids are
unique across the whole backlog, questions and sub-questions alike.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .shapes import check_expectation
from .sparql import QueryError, evaluate, parse_query

KINDS = ("cq", "business_question")
STATUSES = ("open", "in_progress", "answered", "blocked")
LEVELS = ("low", "medium", "high")
EXPECTATIONS = ("nonempty", "empty", "ask_true", "ask_false", "manual")
RATINGS = ("pass", "fail", "partial", "not_feasible")
COLUMNS = ("cq_id", "sub_question_id", "query_present", "result_summary", "rating", "required_work")
QUADRANTS = ("quick_win", "strategic", "fill_in", "reconsider")

_CQ_KEYS = {"id", "text", "cluster", "priority", "kind", "status", "cost", "benefit", "note", "notes", "sub_questions"}
_SUB_KEYS = {"id", "text", "query", "expectation", "rating", "notes", "note"}


class BacklogError(Exception):
    pass


@dataclass
class SubQuestion:
    id: str
    text: str
    query: str | None = None
    expectation: str = "nonempty"
    rating: str | None = None
    notes: str = ""


@dataclass
class CompetencyQuestion:
    id: str
    text: str
    cluster: str | None = None
    priority: int = 1
    kind: str = "cq"
    status: str = "open"
    sub_questions: list[SubQuestion] = field(default_factory=list)
    cost: str | None = None
    benefit: str | None = None
    note: str = ""


def _text(entry: dict, key: str, where: str, required: bool = True) -> str | None:
    value = entry.get(key)
    if value is None:
        if required:
            raise BacklogError(f"{where}: missing '{key}'")
        return None
    if not isinstance(value, (str, int, float)) or isinstance(value, bool):
        raise BacklogError(f"{where}: '{key}' must be text")
    return str(value)


def _choice(entry: dict, key: str, options: tuple, where: str, default):
    value = entry.get(key, default)
    if value is None:
        return default
    if value not in options:
        raise BacklogError(f"{where}: {key} must be one of {', '.join(options)}, got {value!r}")
    return value


def _sub_question(entry, cq_id: str, prologue: str = "") -> SubQuestion:
    if not isinstance(entry, dict):
        raise BacklogError(f"{cq_id}: sub-question entries must be mappings")
    sid = _text(entry, "id", f"{cq_id}: sub-question")
    where = f"{cq_id}/{sid}"
    unknown = set(entry) - _SUB_KEYS
    if unknown:
        raise BacklogError(f"{where}: unknown field(s) {', '.join(sorted(unknown))}")
    sub = SubQuestion(
        sid,
        _text(entry, "text", where),
        _with_prologue(_text(entry, "query", where, required=False), prologue),
        _choice(entry, "expectation", EXPECTATIONS, where, "nonempty"),
        _choice(entry, "rating", RATINGS, where, None),
        _text(entry, "notes", where, required=False) or _text(entry, "note", where, required=False) or "",
    )
    if sub.query is not None:
        try:
            form = parse_query(sub.query).form
        except QueryError as exc:
            raise BacklogError(f"{where}: query does not parse: {exc}") from None
        if sub.expectation != "manual" and sub.expectation.startswith("ask_") != (form == "ASK"):
            raise BacklogError(f"{where}: expectation {sub.expectation} does not fit a {form} query")
    return sub


def _with_prologue(query: str | None, prologue: str) -> str | None:
    return None if query is None else prologue + query


def parse_backlog(data) -> list[CompetencyQuestion]:
    if data is None:
        return []
    prologue = ""
    if isinstance(data, dict):
        unknown = set(data) - {"questions", "prefixes"}
        if unknown:
            raise BacklogError(f"unknown top-level field(s) {', '.join(sorted(unknown))}")
        prefixes = data.get("prefixes") or {}
        if not isinstance(prefixes, dict):
            raise BacklogError("prefixes must be a mapping of prefix to namespace IRI")
        prologue = "".join(f"PREFIX {k}: <{v}>\n" for k, v in prefixes.items())
        data = data.get("questions") or []
    if not isinstance(data, list):
        raise BacklogError("backlog must be a list of questions or a mapping with 'questions'")
    seen: set[str] = set()
    out = []
    for i, entry in enumerate(data, 1):
        if not isinstance(entry, dict):
            raise BacklogError(f"entry {i}: must be a mapping")
        cid = _text(entry, "id", f"entry {i}")
        unknown = set(entry) - _CQ_KEYS
        if unknown:
            raise BacklogError(f"{cid}: unknown field(s) {', '.join(sorted(unknown))}")
        priority = entry.get("priority", 1)
        if not isinstance(priority, int) or isinstance(priority, bool) or priority < 1:
            raise BacklogError(f"{cid}: priority must be an integer >= 1")
        subs_raw = entry.get("sub_questions") or []
        if not isinstance(subs_raw, list):
            raise BacklogError(f"{cid}: sub_questions must be a list")
        cq = CompetencyQuestion(
            cid,
            _text(entry, "text", cid),
            _text(entry, "cluster", cid, required=False),
            priority,
            _choice(entry, "kind", KINDS, cid, "cq"),
            _choice(entry, "status", STATUSES, cid, "open"),
            [_sub_question(s, cid, prologue) for s in subs_raw],
            _choice(entry, "cost", LEVELS, cid, None),
            _choice(entry, "benefit", LEVELS, cid, None),
            _text(entry, "note", cid, required=False) or _text(entry, "notes", cid, required=False) or "",
        )
        if cq.kind == "business_question" and not cq.note.strip():
            raise BacklogError(f"{cid}: a business_question needs a note")
        for ident in [cq.id] + [s.id for s in cq.sub_questions]:
            if ident in seen:
                raise BacklogError(f"duplicate id {ident!r}")
            seen.add(ident)
        out.append(cq)
    return out


def load_backlog(path: str | Path) -> list[CompetencyQuestion]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise BacklogError(f"{path}: not valid YAML: {exc}") from None
    try:
        return parse_backlog(data)
    except BacklogError as exc:
        raise BacklogError(f"{path}: {exc}") from None


def prioritized(backlog: list[CompetencyQuestion]) -> list[CompetencyQuestion]:
    """Backlog ordered by priority, then cluster, keeping file order within ties."""
    return sorted(backlog, key=lambda q: (q.priority, q.cluster or ""))


def clusters(backlog: list[CompetencyQuestion]) -> dict[str, list[str]]:
    out: dict[str, list[str]] = {}
    for q in backlog:
        out.setdefault(q.cluster or "(none)", []).append(q.id)
    return out


# ---------------------------------------------------------------- evaluation

@dataclass
class EvaluationRow:
    cq_id: str
    sub_question_id: str
    query_present: bool
    result_summary: str
    rating: str
    required_work: str
    evaluable: bool = True  # counts in the fulfillment denominator

    def cells(self) -> list[str]:
        return [
            self.cq_id,
            self.sub_question_id,
            "yes" if self.query_present else "no",
            self.result_summary,
            self.rating,
            self.required_work,
        ]


@dataclass
class EvaluationTable:
    rows: list[EvaluationRow]
    fulfillment_rate: float
    passed: int
    evaluable: int
    timestamp: str = ""
    iteration_label: str = ""
    notes: list[str] = field(default_factory=list)

    def row(self, sub_question_id: str) -> EvaluationRow:
        for r in self.rows:
            if r.sub_question_id == sub_question_id:
                return r
        raise KeyError(sub_question_id)

    def to_dict(self) -> dict:
        return {
            "iteration_label": self.iteration_label,
            "timestamp": self.timestamp,
            "fulfillment_rate": self.fulfillment_rate,
            "passed": self.passed,
            "evaluable": self.evaluable,
            "notes": self.notes,
            "rows": [dict(zip(COLUMNS, [r.cq_id, r.sub_question_id, r.query_present, r.result_summary, r.rating, r.required_work])) for r in self.rows],
        }


def fulfillment(passed: int, evaluable: int) -> float:
    return passed / evaluable if evaluable else 0.0


def _rate_sub(cq: CompetencyQuestion, sub: SubQuestion, store) -> EvaluationRow:
    present = sub.query is not None
    evaluable = cq.kind == "cq" and sub.expectation != "manual"
    if sub.expectation == "manual":
        summary = "manual assessment"
        if present:
            try:
                outcome = evaluate(sub.query, store)
                _, summary = check_expectation(outcome, "nonempty" if not isinstance(outcome, bool) else "ask_true")
                summary = f"manual assessment ({summary})"
            except QueryError as exc:
                summary = f"query error: {exc}"
        work = sub.notes or "rate manually"
        return EvaluationRow(cq.id, sub.id, present, summary, sub.rating or "not_feasible", work, evaluable)
    if not present:
        work = sub.notes or "write a query for this sub-question"
        return EvaluationRow(cq.id, sub.id, False, "no query", sub.rating or "not_feasible", work, evaluable)
    try:
        outcome = evaluate(sub.query, store)
    except QueryError as exc:
        return EvaluationRow(cq.id, sub.id, True, f"query error: {exc}", "fail", sub.notes or "fix the query", evaluable)
    passed, summary = check_expectation(outcome, sub.expectation)
    if passed:
        return EvaluationRow(cq.id, sub.id, True, summary, "pass", sub.notes, evaluable)
    work = sub.notes or f"extend data or model until the query meets '{sub.expectation}'"
    return EvaluationRow(cq.id, sub.id, True, summary, "fail", work, evaluable)


def evaluate_backlog(
    backlog: list[CompetencyQuestion], store, iteration_label: str = "", timestamp: str = ""
) -> EvaluationTable:
    """Run every attached query and rate every sub-question, in backlog order.

    The fulfillment rate is passes over sub-questions of kind-cq questions
    whose expectation is not manual; 0/0 is 0.0.
    """
    rows = [_rate_sub(cq, sub, store) for cq in backlog for sub in cq.sub_questions]
    evaluable = sum(1 for r in rows if r.evaluable)
    passed = sum(1 for r in rows if r.evaluable and r.rating == "pass")
    notes = [] if evaluable else ["no evaluable CQs: fulfillment rate defined as 0.0"]
    return EvaluationTable(rows, fulfillment(passed, evaluable), passed, evaluable, timestamp, iteration_label, notes)


def _rate_text(table: EvaluationTable) -> str:
    return f"{table.fulfillment_rate:.4f}"


def render_table(table: EvaluationTable, format: str = "csv") -> str:
    """Render with columns in fixed order and a fulfillment-rate footer row."""
    footer = ["fulfillment_rate", _rate_text(table), f"{table.passed}/{table.evaluable}", "", "", ""]
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
        writer.writerow(COLUMNS)
        for r in table.rows:
            writer.writerow(r.cells())
        writer.writerow(footer)
        return buf.getvalue()
    if format == "markdown":
        def line(cells):
            return "| " + " | ".join(_md_escape(c) for c in cells) + " |"

        out = [line(COLUMNS), "|" + "---|" * len(COLUMNS)]
        out += [line(r.cells()) for r in table.rows]
        out.append(line(footer))
        return "\n".join(out) + "\n"
    if format == "json":
        return json.dumps(table.to_dict(), indent=2, ensure_ascii=False) + "\n"
    raise ValueError(f"unknown table format {format!r}; expected csv, markdown or json")


def _md_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace("|", "\\|").replace("\n", "<br>")


def parse_markdown_table(text: str) -> list[list[str]]:
    """Cells of a rendered markdown table, header and separator excluded."""
    rows = []
    for line in text.splitlines()[2:]:
        body = line.strip()[2:-2]
        cells, cur, i = [], [], 0
        while i < len(body):
            ch = body[i]
            if ch == "\\" and i + 1 < len(body):
                cur.append(body[i + 1])
                i += 2
                continue
            if body.startswith(" | ", i):
                cells.append("".join(cur))
                cur = []
                i += 3
                continue
            cur.append(ch)
            i += 1
        cells.append("".join(cur))
        rows.append([c.replace("<br>", "\n") for c in cells])
    return rows


# ---------------------------------------------------------------- cost-benefit

@dataclass
class CostBenefitMatrix:
    quadrants: dict[str, list[str]]
    unclassified: list[str]
    # CQs placed by the optimistic rule for medium ratings
    assumed: list[str] = field(default_factory=list)

    def quadrant_of(self, cq_id: str) -> str | None:
        for name, ids in self.quadrants.items():
            if cq_id in ids:
                return name
        return None

    def to_dict(self) -> dict:
        return {"quadrants": self.quadrants, "unclassified": self.unclassified, "assumed": self.assumed}

    def to_markdown(self) -> str:
        lines = ["| quadrant | competency questions |", "|---|---|"]
        for name in QUADRANTS:
            lines.append(f"| {name} | {', '.join(self.quadrants[name])} |")
        lines.append(f"| unclassified | {', '.join(self.unclassified)} |")
        if self.assumed:
            lines += ["", "Medium ratings counted as high benefit / low cost for: " + ", ".join(self.assumed)]
        return "\n".join(lines) + "\n"


def build_cost_benefit(backlog: list[CompetencyQuestion]) -> CostBenefitMatrix:
    """Place each CQ rated on both axes in one quadrant.

    Medium benefit counts as high and medium cost counts as low.
    """
    quadrants = {name: [] for name in QUADRANTS}
    unclassified, assumed = [], []
    for q in backlog:
        if q.cost is None or q.benefit is None:
            unclassified.append(q.id)
            continue
        high_benefit = q.benefit in ("high", "medium")
        low_cost = q.cost in ("low", "medium")
        if "medium" in (q.cost, q.benefit):
            assumed.append(q.id)
        if high_benefit:
            quadrants["quick_win" if low_cost else "strategic"].append(q.id)
        else:
            quadrants["fill_in" if low_cost else "reconsider"].append(q.id)
    return CostBenefitMatrix(quadrants, unclassified, assumed)
