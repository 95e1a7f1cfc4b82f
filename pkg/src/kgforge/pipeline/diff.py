"""Compare two iteration reports (report.json) for the next planning round."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class IterationDiff:
    fulfillment_rate_delta: float = 0.0
    newly_passing: list[str] = field(default_factory=list)
    newly_failing: list[str] = field(default_factory=list)
    triple_count_delta: int = 0
    new_violations: list[str] = field(default_factory=list)
    resolved_violations: list[str] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not (
            self.fulfillment_rate_delta or self.newly_passing or self.newly_failing
            or self.triple_count_delta or self.new_violations or self.resolved_violations
        )

    def to_dict(self) -> dict:
        return {
            "fulfillment_rate_delta": self.fulfillment_rate_delta,
            "newly_passing": self.newly_passing,
            "newly_failing": self.newly_failing,
            "triple_count_delta": self.triple_count_delta,
            "new_violations": self.new_violations,
            "resolved_violations": self.resolved_violations,
        }

    def to_text(self) -> str:
        if self.empty:
            return "no changes\n"
        lines = [
            f"fulfillment rate delta: {self.fulfillment_rate_delta:+.4f}",
            f"triple count delta: {self.triple_count_delta:+d}",
        ]
        for title, items in (
            ("newly passing", self.newly_passing),
            ("newly failing", self.newly_failing),
            ("new violations", self.new_violations),
            ("resolved violations", self.resolved_violations),
        ):
            if items:
                lines.append(f"{title}:")
                lines += [f"  {x}" for x in items]
        return "\n".join(lines) + "\n"


def load_report(path: str | Path) -> dict:
    """report.json, or an iteration directory containing one."""
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    return json.loads(path.read_text(encoding="utf-8"))


def _ratings(report: dict) -> dict[str, str]:
    ev = report.get("evaluation") or {}
    return {r["sub_question_id"]: r["rating"] for r in ev.get("rows", [])}


def violation_keys(report: dict) -> set[str]:
    """Stable one-line identifiers for every quality-check failure."""
    q = report.get("quality") or {}
    keys = set()
    for f in q.get("level1", {}).get("files", []):
        for e in f.get("errors", []):
            keys.add(f"level1 {f['path']}:{e['line']}:{e['column']} {e['message']}")
    for v in q.get("level2", {}).get("violations", []):
        keys.add(f"level2 {v['rule_name']} {v['message']}")
    level3 = q.get("level3", {})
    for part in ("shapes", "queries"):
        for v in level3.get(part, {}).get("violations", []):
            keys.add(f"level3 {v['shape']} {v['focus_node']} {v['constraint']} {v.get('path') or ''} {v.get('value') or ''}".rstrip())
    return keys


def diff_iterations(report_a: dict, report_b: dict) -> IterationDiff:
    """Changes from iteration a to iteration b."""
    ra, rb = _ratings(report_a), _ratings(report_b)
    rate_a = (report_a.get("evaluation") or {}).get("fulfillment_rate", 0.0)
    rate_b = (report_b.get("evaluation") or {}).get("fulfillment_rate", 0.0)
    va, vb = violation_keys(report_a), violation_keys(report_b)
    return IterationDiff(
        fulfillment_rate_delta=rate_b - rate_a,
        newly_passing=sorted(k for k, v in rb.items() if v == "pass" and ra.get(k) != "pass"),
        newly_failing=sorted(k for k, v in rb.items() if v != "pass" and ra.get(k) == "pass"),
        triple_count_delta=report_b.get("triple_count", 0) - report_a.get("triple_count", 0),
        new_violations=sorted(vb - va),
        resolved_violations=sorted(va - vb),
    )
