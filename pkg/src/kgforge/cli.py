"""Command-line interface.

Exit status: 0 when everything passed, 1 when a stage failed, the lint
found errors or a quality level failed, 2 for configuration errors (bad manifest,
missing inputs, bad arguments).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dataprep import DataPrepError, ingest_csv, profile
from .ontology import extract_vocabulary, findings_to_json, findings_to_text, has_errors, lint
from .pipeline import (
    ManifestError,
    diff_iterations,
    load_iteration_store,
    load_manifest,
    load_report,
    make_server,
    run_iteration,
)
from .rdf import Dataset, RDFSyntaxError, parse_file

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

# subcommand -> last stage it runs
STAGE_OF = {
    "profile": "understanding",
    "prep": "preparation",
    "lint": "modeling",
    "map": "graph_setup",
    "load": "import",
    "quality": "quality",
    "evaluate": "evaluation",
    "run": "evaluation",
}


def _manifest(args):
    if not args.manifest:
        raise ManifestError("--manifest is required (or set the inputs on the command line)")
    overrides = {
        "iteration_label": args.iteration,
        "output_dir": str(Path(args.out).resolve()) if args.out else None,
        "serialization": getattr(args, "format", None),
    }
    return load_manifest(args.manifest, overrides)


def _print_stages(report) -> None:
    for s in report.stages:
        print(f"{s.name:<14} {s.status:<8} {s.detail}")
    print(f"artifacts: {report.iteration_dir}")


def _staged(args) -> int:
    manifest = _manifest(args)
    report = run_iteration(manifest, until=STAGE_OF[args.command])
    _print_stages(report)
    if any(s.status == "error" for s in report.stages):
        return EXIT_FAIL
    if args.command == "lint" and any(f["severity"] == "error" for f in report.lint_findings):
        return EXIT_FAIL
    if report.quality is not None and report.quality["overall"] != "pass":
        return EXIT_FAIL
    if args.command in ("quality", "evaluate", "run"):
        print(f"overall: {report.overall}")
    return EXIT_OK


def _profile_files(args) -> int:
    for path in args.inputs:
        try:
            table = ingest_csv(path)
        except OSError as exc:
            raise ManifestError(f"cannot read {path}: {exc.strerror}") from None
        prof = profile(table)
        sys.stdout.write(prof.to_json() if args.json else prof.to_markdown())
    return EXIT_OK


def _lint_files(args) -> int:
    findings = []
    for path in args.inputs:
        try:
            graph = parse_file(path)
        except OSError as exc:
            raise ManifestError(f"cannot read {path}: {exc.strerror}") from None
        except RDFSyntaxError as exc:
            print(f"{path}: {exc}", file=sys.stderr)
            return EXIT_FAIL
        if isinstance(graph, Dataset):
            graph = graph.default_graph
        findings += lint(extract_vocabulary(graph))
    sys.stdout.write(findings_to_json(findings) if args.json else findings_to_text(findings))
    return EXIT_FAIL if has_errors(findings) else EXIT_OK


def _serve(args) -> int:
    if args.inputs:
        root = Path(args.inputs[0])
    else:
        root = _manifest(args).iteration_dir
    try:
        store = load_iteration_store(root)
    except FileNotFoundError as exc:
        raise ManifestError(str(exc)) from None
    server = make_server(store, args.bind, args.port, verbose=True)
    host, port = server.server_address[:2]
    print(f"serving {len(store)} triples from {root} at http://{host}:{port}/sparql", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def _diff(args) -> int:
    if len(args.inputs) != 2:
        raise ManifestError("diff needs two iteration directories or report files")
    try:
        a, b = (load_report(p) for p in args.inputs)
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read report: {exc}") from None
    d = diff_iterations(a, b)
    sys.stdout.write(json.dumps(d.to_dict(), indent=2) + "\n" if args.json else d.to_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgforge", description="Build and evaluate RDF knowledge graphs from tabular data.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "profile": "ingest sources and write data quality profiles (or profile CSV files given as arguments)",
        "prep": "run the stages up to data preparation",
        "lint": "lint the ontology (or Turtle files given as arguments)",
        "map": "run the stages up to RDF generation",
        "load": "run the stages up to store import and integrity queries",
        "quality": "run the stages up to the three-level quality check",
        "evaluate": "run the stages up to competency-question evaluation",
        "run": "run a full iteration",
        "serve": "serve a finished iteration over HTTP (read-only SPARQL)",
        "diff": "compare two iteration reports",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text)
        p.add_argument("inputs", nargs="*", help=argparse.SUPPRESS if name not in ("profile", "lint", "serve", "diff") else "input files or directories")
        p.add_argument("--manifest", help="project manifest (YAML)")
        p.add_argument("--iteration", help="iteration label (overrides the manifest)")
        p.add_argument("--out", help="output directory (overrides the manifest)")
        p.add_argument("--format", choices=("turtle", "nquads"), help="serialization of the data artifacts")
        p.add_argument("--json", action="store_true", help="JSON output where applicable")
        if name == "serve":
            p.add_argument("--port", type=int, default=3030)
            p.add_argument("--bind", default="127.0.0.1")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "profile" and args.inputs:
            return _profile_files(args)
        if args.command == "lint" and args.inputs:
            return _lint_files(args)
        if args.command == "serve":
            return _serve(args)
        if args.command == "diff":
            return _diff(args)
        if args.inputs:
            parser.error(f"{args.command} takes no positional arguments; use --manifest")
        return _staged(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataPrepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
