"""Project manifest: one YAML file describing an iteration.

Relative paths are resolved against the manifest's directory. Scalar
settings can be overridden from the environment (``KGF_`` prefix) and then
from the command line, in that order of increasing precedence.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

from ..dataprep import COLUMN_TYPES, DataPrepError, IngestOptions, JoinSpec
from ..dataprep.clean import OPS
from ..inference import RULESETS
from ..shapes import EXPECTATIONS

SERIALIZATIONS = ("turtle", "nquads")
ENV_OVERRIDES = {
    "KGF_PROJECT_NAME": "project_name",
    "KGF_ITERATION_LABEL": "iteration_label",
    "KGF_OUTPUT_DIR": "output_dir",
    "KGF_RULESET": "ruleset",
    "KGF_SERIALIZATION": "serialization",
}
_TOP_KEYS = {
    "project_name", "iteration_label", "data_sources", "prep", "ontology", "mappings", "shapes",
    "ruleset", "backlog", "integrity_queries", "output_dir", "serialization",
}


class ManifestError(Exception):
    pass


@dataclass
class DataSource:
    name: str
    path: Path
    format: str = "csv"
    options: IngestOptions = field(default_factory=IngestOptions)
    types: dict[str, str] = field(default_factory=dict)


@dataclass
class PrepStep:
    kind: str  # clean | join
    table: str | None = None
    ops: list[dict] = field(default_factory=list)
    join: JoinSpec | None = None

    @property
    def output(self) -> str:
        if self.kind == "clean":
            return self.table
        return self.join.name or self.join.left_table


@dataclass
class IntegrityCheck:
    name: str
    path: Path
    expectation: str = "nonempty"


@dataclass
class ProjectManifest:
    project_name: str
    iteration_label: str
    data_sources: list[DataSource]
    prep: list[PrepStep]
    ontology: Path | None
    mappings: list[Path]
    shapes: Path | None
    ruleset: str
    backlog: Path | None
    integrity_queries: list[IntegrityCheck]
    output_dir: Path
    serialization: str = "nquads"
    source: Path | None = None

    @property
    def iteration_dir(self) -> Path:
        return self.output_dir / self.iteration_label

    def input_paths(self) -> list[Path]:
        paths = [s.path for s in self.data_sources]
        paths += [p for p in (self.ontology, self.shapes, self.backlog) if p is not None]
        paths += self.mappings + [q.path for q in self.integrity_queries]
        return paths

    def snapshot(self) -> dict:
        """JSON-ready copy with paths relative to the manifest directory where possible."""
        base = self.source.parent if self.source else Path.cwd()

        def rel(p):
            if isinstance(p, Path):
                try:
                    return p.relative_to(base).as_posix()
                except ValueError:
                    return p.as_posix()
            if isinstance(p, dict):
                return {k: rel(v) for k, v in p.items()}
            if isinstance(p, list):
                return [rel(v) for v in p]
            return p

        data = asdict(self)
        data.pop("source")
        return rel(data)


def _require(data: dict, key: str, where: str):
    if key not in data or data[key] in (None, ""):
        raise ManifestError(f"{where}: missing required key '{key}'")
    return data[key]


def _unique(names: list[str], section: str) -> None:
    seen = set()
    for n in names:
        if n in seen:
            raise ManifestError(f"{section}: duplicate name '{n}'")
        seen.add(n)


def _source(entry, base: Path, i: int) -> DataSource:
    where = f"data_sources[{i}]"
    if not isinstance(entry, dict):
        raise ManifestError(f"{where}: expected a mapping")
    unknown = set(entry) - {"name", "path", "format", "options", "types"}
    if unknown:
        raise ManifestError(f"{where}: unknown key(s) {', '.join(sorted(unknown))}")
    fmt = entry.get("format", "csv")
    if fmt != "csv":
        raise ManifestError(f"{where}: unsupported format '{fmt}' (only csv)")
    types = dict(entry.get("types") or {})
    for col, typ in types.items():
        if typ not in COLUMN_TYPES:
            raise ManifestError(f"{where}: column '{col}' has unknown type '{typ}'")
    try:
        options = IngestOptions.from_dict(entry.get("options"))
    except (DataPrepError, TypeError) as exc:
        raise ManifestError(f"{where}: {exc}") from None
    return DataSource(str(_require(entry, "name", where)), base / _require(entry, "path", where), fmt, options, types)


def _prep(entry, i: int) -> PrepStep:
    where = f"prep[{i}]"
    if not isinstance(entry, dict) or len(entry) != 1:
        raise ManifestError(f"{where}: expected a single 'clean' or 'join' entry")
    (kind, body), = entry.items()
    if kind == "clean":
        if not isinstance(body, dict):
            raise ManifestError(f"{where}: clean needs 'table' and 'ops'")
        ops = body.get("ops") or []
        for op in ops:
            if not isinstance(op, dict) or op.get("op") not in OPS:
                raise ManifestError(f"{where}: unknown clean op {op!r}")
        return PrepStep("clean", str(_require(body, "table", where)), list(ops))
    if kind == "join":
        try:
            spec = JoinSpec.from_dict(body)
        except DataPrepError as exc:
            raise ManifestError(f"{where}: {exc}") from None
        return PrepStep("join", join=spec)
    raise ManifestError(f"{where}: unknown prep step '{kind}'")


def _integrity(entry, base: Path, i: int) -> IntegrityCheck:
    where = f"integrity_queries[{i}]"
    if not isinstance(entry, dict):
        raise ManifestError(f"{where}: expected a mapping")
    expectation = entry.get("expectation", "nonempty")
    if expectation not in EXPECTATIONS:
        raise ManifestError(f"{where}: unknown expectation '{expectation}'")
    return IntegrityCheck(str(_require(entry, "name", where)), base / _require(entry, "path", where), expectation)


def parse_manifest(data: dict, base: Path, overrides: dict | None = None, env: dict | None = None) -> ProjectManifest:
    if not isinstance(data, dict):
        raise ManifestError("manifest must be a mapping")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ManifestError(f"unknown manifest key(s): {', '.join(sorted(unknown))}")
    data = dict(data)
    env = os.environ if env is None else env
    for var, key in ENV_OVERRIDES.items():
        if env.get(var):
            data[key] = env[var]
    for key, value in (overrides or {}).items():
        if value is not None:
            data[key] = value

    sources = [_source(e, base, i) for i, e in enumerate(data.get("data_sources") or [])]
    _unique([s.name for s in sources], "data_sources")
    prep = [_prep(e, i) for i, e in enumerate(data.get("prep") or [])]
    checks = [_integrity(e, base, i) for i, e in enumerate(data.get("integrity_queries") or [])]
    _unique([c.name for c in checks], "integrity_queries")
    mappings = [base / p for p in data.get("mappings") or []]
    _unique([p.stem for p in mappings], "mappings")

    ruleset = data.get("ruleset", "default")
    if ruleset not in RULESETS:
        raise ManifestError(f"ruleset must be one of {', '.join(RULESETS)}, got '{ruleset}'")
    serialization = data.get("serialization", "nquads")
    if serialization not in SERIALIZATIONS:
        raise ManifestError(f"serialization must be one of {', '.join(SERIALIZATIONS)}, got '{serialization}'")

    def opt(key):
        return base / data[key] if data.get(key) else None

    return ProjectManifest(
        project_name=str(_require(data, "project_name", "manifest")),
        iteration_label=str(data.get("iteration_label") or "iteration-1"),
        data_sources=sources,
        prep=prep,
        ontology=opt("ontology"),
        mappings=mappings,
        shapes=opt("shapes"),
        ruleset=ruleset,
        backlog=opt("backlog"),
        integrity_queries=checks,
        output_dir=base / str(data.get("output_dir") or "output"),
        serialization=serialization,
    )


def load_manifest(path: str | Path, overrides: dict | None = None, env: dict | None = None) -> ProjectManifest:
    """Read, validate and check that every referenced input exists."""
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ManifestError(f"manifest {path} is not valid YAML: {exc}") from None
    manifest = parse_manifest(data, path.resolve().parent, overrides, env)
    manifest.source = path.resolve()
    for p in manifest.input_paths():
        if not p.is_file():
            raise ManifestError(f"referenced file does not exist: {p}")
    return manifest
