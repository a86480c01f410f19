from __future__ import annotations

import os

import pytest

# criterion id -> (passed, detail); filled by the acceptance suite
ACCEPTANCE: dict = {}


def pytest_collection_modifyitems(config, items):
    if os.environ.get("PACKLAB_FULL") == "1":
        return
    skip = pytest.mark.skip(reason="long-running; set PACKLAB_FULL=1")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def acceptance():
    return ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: (int(k.split()[0]), k)):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  {detail}")
