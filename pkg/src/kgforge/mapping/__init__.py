"""Declarative row-to-RDF mapping."""

from .engine import MappingLog, SkippedStatement, apply_mapping, check_plan_against_tables, encode_value
from .integrity import IntegrityQuery, IntegrityResult, run_integrity_queries
from .plan import (
    TEMPLATE_KINDS,
    MappingError,
    MappingPlan,
    MappingRule,
    Placeholder,
    Statement,
    TermTemplate,
    compile_mapping,
    eval_filter,
    parse_filter,
    split_segments,
)

__all__ = [
    "IntegrityQuery",
    "IntegrityResult",
    "MappingError",
    "MappingLog",
    "MappingPlan",
    "MappingRule",
    "Placeholder",
    "SkippedStatement",
    "Statement",
    "TEMPLATE_KINDS",
    "TermTemplate",
    "apply_mapping",
    "check_plan_against_tables",
    "compile_mapping",
    "encode_value",
    "eval_filter",
    "parse_filter",
    "run_integrity_queries",
    "split_segments",
]
