"""Data quality profile over five criteria.

Three criteria get a numeric score: completeness, uniform representation and
faultlessness. Unambiguous interpretability and credibility need human
judgement, so their score is the string "manual" and only heuristic findings
are reported.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field

from .table import Table
from .types import FORMAT_ORDER, format_class, infer_type, parse_as

CRITERIA = (
    "unambiguous_interpretability",
    "uniform_representation",
    "credibility",
    "faultlessness",
    "completeness",
)
MANUAL = "manual"
DATE_RANGE = (1900, 2100)


@dataclass
class Finding:
    column: str | None
    message: str
    row_indices: list[int] = field(default_factory=list)


@dataclass
class CriterionResult:
    score: float | str
    findings: list[Finding] = field(default_factory=list)


@dataclass
class ColumnProfile:
    name: str
    declared_type: str | None
    effective_type: str
    null_count: int
    formats: dict[str, int]
    uniformity: float | None


@dataclass
class QualityProfile:
    table: str
    row_count: int
    column_count: int
    criteria: dict[str, CriterionResult]
    columns: list[ColumnProfile]

    def score(self, criterion: str) -> float | str:
        return self.criteria[criterion].score

    def to_dict(self) -> dict:
        return {
            "table": self.table,
            "row_count": self.row_count,
            "column_count": self.column_count,
            "criteria": {name: asdict(self.criteria[name]) for name in CRITERIA},
            "columns": [asdict(c) for c in self.columns],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    def to_markdown(self) -> str:
        lines = [f"# Data quality profile: {self.table}", ""]
        lines.append(f"{self.row_count} rows, {self.column_count} columns.")
        lines += ["", "| criterion | score | findings |", "|---|---|---|"]
        for name in CRITERIA:
            result = self.criteria[name]
            score = result.score if isinstance(result.score, str) else f"{result.score:.4f}"
            lines.append(f"| {name} | {score} | {len(result.findings)} |")
        lines += ["", "| column | declared | effective | nulls | uniformity | formats |", "|---|---|---|---|---|---|"]
        for c in self.columns:
            fmt = ", ".join(f"{k}: {v}" for k, v in c.formats.items())
            uni = "" if c.uniformity is None else f"{c.uniformity:.4f}"
            lines.append(f"| {c.name} | {c.declared_type or ''} | {c.effective_type} | {c.null_count} | {uni} | {fmt} |")
        for name in CRITERIA:
            findings = self.criteria[name].findings
            if not findings:
                continue
            lines += ["", f"## {name}", ""]
            for f in findings:
                where = f" (rows {_rows(f.row_indices)})" if f.row_indices else ""
                col = f"`{f.column}`: " if f.column else ""
                lines.append(f"- {col}{f.message}{where}")
        return "\n".join(lines) + "\n"


def _rows(indices: list[int], limit: int = 20) -> str:
    shown = ", ".join(str(i) for i in indices[:limit])
    return shown + (f", ... ({len(indices)} total)" if len(indices) > limit else "")


def _completeness(table: Table) -> CriterionResult:
    total = len(table.rows) * len(table.columns)
    findings = []
    nulls = 0
    for i, col in enumerate(table.columns):
        missing = [r for r, row in enumerate(table.rows) if row[i] is None]
        nulls += len(missing)
        if missing:
            findings.append(Finding(col.name, f"{len(missing)} of {len(table.rows)} cells are null", missing))
    score = 1.0 if total == 0 else 1.0 - nulls / total
    return CriterionResult(score, findings)


def _uniformity(table: Table, classes: list[list[str | None]]) -> tuple[CriterionResult, list[float | None]]:
    ratios: list[float | None] = []
    findings = []
    for col, cells in zip(table.columns, classes):
        present = [c for c in cells if c is not None]
        if not present:
            ratios.append(None)
            continue
        counts = Counter(present)
        top = max(counts.values())
        ratios.append(top / len(present))
        if len(counts) > 1:
            # majority class: largest, ties resolved by the fixed class order
            major = min((k for k, v in counts.items() if v == top), key=FORMAT_ORDER.index)
            minority = [r for r, c in enumerate(cells) if c is not None and c != major]
            mix = ", ".join(f"{k} {counts[k]}" for k in FORMAT_ORDER if k in counts)
            findings.append(Finding(col.name, f"mixed formats ({mix}); majority {major}", minority))
    scored = [r for r in ratios if r is not None]
    score = sum(scored) / len(scored) if scored else 1.0
    return CriterionResult(score, findings), ratios


def _faultlessness(table: Table, types: list[str]) -> CriterionResult:
    ok = total = 0
    findings = []
    for i, (col, typ) in enumerate(zip(table.columns, types)):
        bad = []
        for r, row in enumerate(table.rows):
            cell = row[i]
            if cell is None:
                continue
            total += 1
            if parse_as(cell, typ) is None:
                bad.append(r)
            else:
                ok += 1
        if bad:
            source = "declared" if col.declared_type else "inferred"
            findings.append(Finding(col.name, f"{len(bad)} cells do not parse as {source} type {typ}", bad))
    return CriterionResult(1.0 if total == 0 else ok / total, findings)


def _interpretability(table: Table, classes: list[list[str | None]]) -> CriterionResult:
    findings = []
    if table.synthetic_header:
        findings.append(Finding(None, "no header row; column names were synthesised"))
    for col, cells in zip(table.columns, classes):
        if col.source_name is not None:
            original = col.source_name.strip() or "(empty)"
            findings.append(Finding(col.name, f"renamed from duplicate or empty header {original!r}"))
        slashed = [r for r, c in enumerate(cells) if c == "slashed_date"]
        if slashed:
            findings.append(Finding(col.name, "slashed dates are ambiguous (day/month order)", slashed))
        if "decimal_comma" in cells and "decimal_dot" in cells:
            findings.append(Finding(col.name, "both decimal comma and decimal dot in use"))
    return CriterionResult(MANUAL, findings)


def _credibility(table: Table, types: list[str]) -> CriterionResult:
    findings = []
    if len(table.rows) >= 2:
        for i, col in enumerate(table.columns):
            present = {row[i] for row in table.rows if row[i] is not None}
            if len(present) == 1 and all(row[i] is not None for row in table.rows):
                findings.append(Finding(col.name, f"constant column (every value is {next(iter(present))!r})"))
    lo, hi = DATE_RANGE
    for i, (col, typ) in enumerate(zip(table.columns, types)):
        if typ not in ("date", "datetime"):
            continue
        out = []
        for r, row in enumerate(table.rows):
            value = row[i] and parse_as(row[i], typ)
            if value and not lo <= int(value[:4]) <= hi:
                out.append(r)
        if out:
            findings.append(Finding(col.name, f"dates outside {lo}-{hi}", out))
    seen: dict[tuple, int] = {}
    dups = []
    for r, row in enumerate(table.rows):
        key = tuple(row)
        if key in seen:
            dups.append(r)
        else:
            seen[key] = r
    if dups:
        findings.append(Finding(None, f"{len(dups)} duplicate rows", dups))
    return CriterionResult(MANUAL, findings)


def profile(table: Table) -> QualityProfile:
    """Profile `table` against the five data quality criteria, in fixed order."""
    classes = [[None if row[i] is None else format_class(row[i]) for row in table.rows] for i in range(len(table.columns))]
    types = [c.declared_type or infer_type(table.values(c.name)) for c in table.columns]
    uniform, ratios = _uniformity(table, classes)
    criteria = {
        "unambiguous_interpretability": _interpretability(table, classes),
        "uniform_representation": uniform,
        "credibility": _credibility(table, types),
        "faultlessness": _faultlessness(table, types),
        "completeness": _completeness(table),
    }
    columns = []
    for col, typ, cells, ratio in zip(table.columns, types, classes, ratios):
        counts = Counter(c for c in cells if c is not None)
        columns.append(
            ColumnProfile(
                col.name,
                col.declared_type,
                typ,
                sum(1 for c in cells if c is None),
                {k: counts[k] for k in FORMAT_ORDER if k in counts},
                ratio,
            )
        )
    return QualityProfile(table.name, len(table.rows), len(table.columns), criteria, columns)
