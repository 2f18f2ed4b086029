import json
from pathlib import Path

import pytest

_FROZEN = json.loads((Path(__file__).parent / "oracles" / "frozen.json").read_text())


@pytest.fixture(scope="session")
def oracle():
    return _FROZEN


ACCEPTANCE_LINES = []


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert."""

    def record(number, title, ok, detail, elapsed, budget):
        ok = bool(ok) and elapsed < budget
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {title} | {detail} | {elapsed:.2f}s < {budget:g}s"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
