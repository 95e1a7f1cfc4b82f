"""Result containers and the SPARQL JSON / CSV result formats."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from ..rdf.graph import Graph
from ..rdf.terms import IRI, XSD_STRING, BlankNode, Literal, Term

MEDIA_TYPES = {
    "sparql-json": "application/sparql-results+json",
    "csv": "text/csv; charset=utf-8",
}


@dataclass
class SolutionSequence:
    variables: list[str]
    rows: list[dict[str, Term]] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def column(self, name: str) -> list[Term | None]:
        return [row.get(name) for row in self.rows]


def term_to_json(term: Term) -> dict:
    if type(term) is IRI:
        return {"type": "uri", "value": term.value}
    if type(term) is BlankNode:
        return {"type": "bnode", "value": term.label}
    out = {"type": "literal", "value": term.lexical}
    if term.language:
        out["xml:lang"] = term.language
    elif term.datatype != XSD_STRING:
        out["datatype"] = term.datatype
    return out


def term_from_json(obj: dict) -> Term:
    kind = obj["type"]
    if kind == "uri":
        return IRI(obj["value"])
    if kind == "bnode":
        return BlankNode(obj["value"])
    if kind in ("literal", "typed-literal"):
        if "xml:lang" in obj:
            return Literal(obj["value"], language=obj["xml:lang"])
        return Literal(obj["value"], obj.get("datatype"))
    raise ValueError(f"unknown binding type {kind!r}")


def results_to_json_obj(result) -> dict:
    if isinstance(result, bool):
        return {"head": {}, "boolean": result}
    bindings = [
        {name: term_to_json(row[name]) for name in result.variables if row.get(name) is not None}
        for row in result.rows
    ]
    return {"head": {"vars": list(result.variables)}, "results": {"bindings": bindings}}


def _csv_cell(term: Term | None) -> str:
    if term is None:
        return ""
    if type(term) is IRI:
        return term.value
    if type(term) is BlankNode:
        return "_:" + term.label
    return term.lexical


def serialize_results(result, format: str = "sparql-json") -> str:
    """Serialize a SELECT (SolutionSequence) or ASK (bool) result."""
    if isinstance(result, Graph):
        raise ValueError("CONSTRUCT results are graphs; serialize them as RDF")
    if format == "sparql-json":
        return json.dumps(results_to_json_obj(result), ensure_ascii=False, separators=(",", ":"))
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        if isinstance(result, bool):
            writer.writerow(["boolean"])
            writer.writerow(["true" if result else "false"])
        else:
            writer.writerow(result.variables)
            for row in result.rows:
                writer.writerow([_csv_cell(row.get(name)) for name in result.variables])
        return buf.getvalue()
    raise ValueError(f"unknown result format {format!r}")


def parse_results_json(text: str):
    """Inverse of the sparql-json serialization: a SolutionSequence or bool."""
    obj = json.loads(text)
    if "boolean" in obj:
        return bool(obj["boolean"])
    variables = list(obj["head"].get("vars", []))
    rows = [{k: term_from_json(v) for k, v in b.items()} for b in obj["results"]["bindings"]]
    return SolutionSequence(variables, rows)

