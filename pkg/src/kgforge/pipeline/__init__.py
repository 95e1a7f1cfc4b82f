"""Manifest-driven iteration runner, query endpoint and iteration diff."""

from .diff import IterationDiff, diff_iterations, load_report, violation_keys
from .manifest import ENV_OVERRIDES, ManifestError, ProjectManifest, load_manifest, parse_manifest
from .runner import (
    DATA_GRAPH_PREFIX,
    INFERRED_GRAPH,
    ONTOLOGY_GRAPH,
    STAGES,
    IterationReport,
    StageRecord,
    data_graph,
    load_iteration_store,
    run_iteration,
)
from .server import answer, make_server, serve_in_thread

__all__ = [
    "DATA_GRAPH_PREFIX",
    "ENV_OVERRIDES",
    "INFERRED_GRAPH",
    "ONTOLOGY_GRAPH",
    "STAGES",
    "IterationDiff",
    "IterationReport",
    "ManifestError",
    "ProjectManifest",
    "StageRecord",
    "answer",
    "data_graph",
    "diff_iterations",
    "load_iteration_store",
    "load_manifest",
    "load_report",
    "make_server",
    "parse_manifest",
    "run_iteration",
    "serve_in_thread",
    "violation_keys",
]
