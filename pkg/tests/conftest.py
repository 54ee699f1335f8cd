from __future__ import annotations

import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def record_acceptance():
    """Append one PASS/FAIL line per acceptance criterion; printed at the end."""

    def record(number: int, title: str, passed: bool, detail: str = ""):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d}: {title}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
        terminalreporter.write_line(line)
