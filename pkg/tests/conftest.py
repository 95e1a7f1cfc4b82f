import shutil
from pathlib import Path

import pytest

DEMO = Path(__file__).resolve().parents[1] / "src" / "kgforge" / "demo"


@pytest.fixture
def demo(tmp_path) -> Path:
    """Writable copy of the bundled demo project; returns its directory."""
    target = tmp_path / "demo"
    shutil.copytree(DEMO, target, ignore=shutil.ignore_patterns("output", "__pycache__"))
    return target


# one summary line per acceptance criterion
_criteria: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        name = report.nodeid.split("::test_criterion_", 1)[1]
        detail = dict(report.user_properties).get("detail", "")
        _criteria[name] = ("PASS" if report.outcome == "passed" else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_", 1)[0])):
        status, detail = _criteria[name]
        number, slug = name.split("_", 1)
        terminalreporter.write_line(f"criterion {number} [{slug.replace('_', ' ')}]: {status}  {detail}".rstrip())
