from __future__ import annotations

import numpy as np
import pytest

from orbitcert.structure import cached_structure

NONCOMPACT = [("sl", 2), ("sl", 3), ("sl", 4), ("sl", 5), ("so1n", 2), ("so1n", 3), ("so1n", 4)]

# filled by tests/test_acceptance.py, printed at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


@pytest.fixture(params=NONCOMPACT, ids=lambda p: f"{p[0]}{p[1]}")
def structure(request):
    return cached_structure(*request.param)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
