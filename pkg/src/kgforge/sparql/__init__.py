"""SPARQL-subset query engine: parse, evaluate, serialize results."""

from .ast import Query, QueryError, QuerySyntaxError, UnsupportedFeatureError
from .evaluator import evaluate
from .parser import parse_query
from .results import MEDIA_TYPES, SolutionSequence, parse_results_json, serialize_results

__all__ = [
    "MEDIA_TYPES",
    "Query",
    "QueryError",
    "QuerySyntaxError",
    "SolutionSequence",
    "UnsupportedFeatureError",
    "evaluate",
    "parse_query",
    "parse_results_json",
    "serialize_results",
]
