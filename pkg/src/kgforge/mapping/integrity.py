"""Named ASK/SELECT checks run against freshly mapped data."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..sparql import QueryError, SolutionSequence, evaluate, parse_query


@dataclass(frozen=True)
class IntegrityQuery:
    name: str
    query: str
    expect_empty: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "IntegrityQuery":
        unknown = set(data) - {"name", "query", "expect_empty"}
        if unknown or "name" not in data or "query" not in data:
            raise ValueError(f"integrity query needs 'name' and 'query' (got keys {sorted(data)})")
        return cls(data["name"], data["query"], bool(data.get("expect_empty", False)))


@dataclass
class IntegrityResult:
    name: str
    passed: bool
    detail: str

    def to_dict(self) -> dict:
        return asdict(self)


def run_integrity_queries(data, queries: list[IntegrityQuery]) -> list[IntegrityResult]:
    """ASK passes iff true; SELECT/CONSTRUCT pass iff non-empty, or empty when expect_empty.

    A query that fails to parse or evaluate is reported as failed, not raised.
    """
    results = []
    for q in queries:
        try:
            parsed = parse_query(q.query)
            outcome = evaluate(parsed, data)
        except QueryError as exc:
            results.append(IntegrityResult(q.name, False, f"query error: {exc}"))
            continue
        if isinstance(outcome, bool):
            passed = outcome if not q.expect_empty else not outcome
            results.append(IntegrityResult(q.name, passed, f"ASK returned {str(outcome).lower()}"))
            continue
        size = len(outcome.rows) if isinstance(outcome, SolutionSequence) else len(outcome)
        unit = "rows" if isinstance(outcome, SolutionSequence) else "triples"
        passed = (size == 0) if q.expect_empty else (size > 0)
        expectation = "expected none" if q.expect_empty else "expected at least one"
        results.append(IntegrityResult(q.name, passed, f"{size} {unit} ({expectation})"))
    return results
