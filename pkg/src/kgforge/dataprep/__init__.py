"""Tabular ingestion, quality profiling, cleaning and denormalizing joins."""

from .clean import CleanResult, OpLogEntry, clean
from .ingest import IngestOptions, ingest_csv, read_csv_text, write_csv
from .join import JoinSpec, denormalize
from .profile import CRITERIA, MANUAL, CriterionResult, Finding, QualityProfile, profile
from .table import COLUMN_TYPES, Column, DataPrepError, Table
from .types import FORMAT_ORDER, format_class, infer_type, parse_as

__all__ = [
    "COLUMN_TYPES",
    "CRITERIA",
    "CleanResult",
    "Column",
    "CriterionResult",
    "DataPrepError",
    "FORMAT_ORDER",
    "Finding",
    "IngestOptions",
    "JoinSpec",
    "MANUAL",
    "OpLogEntry",
    "QualityProfile",
    "Table",
    "clean",
    "denormalize",
    "format_class",
    "infer_type",
    "ingest_csv",
    "parse_as",
    "profile",
    "read_csv_text",
    "write_csv",
]
