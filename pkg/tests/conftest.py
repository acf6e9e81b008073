import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"


@pytest.fixture
def scenario_dir():
    return SCENARIOS


@pytest.fixture(autouse=True)
def _no_catalog_env(monkeypatch):
    # tests use the bundled catalog unless they set one explicitly
    monkeypatch.delenv("AHRELAY_CATALOG", raising=False)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit, checks in results.items():
        ok = all(c[1] for c in checks)
        detail = "; ".join(f"{label}: {d}" + ("" if good else " [FAIL]") for label, good, d in checks)
        tr.write_line(f"criterion {crit:<3} {'PASS' if ok else 'FAIL'}  {detail}")
