from __future__ import annotations

import pytest

# one line per acceptance criterion, filled in by tests/test_acceptance.py
CRITERIA: dict[str, str] = {}


def _order(label: str):
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits), label


@pytest.fixture
def criterion():
    def record(label: int | str, ok: bool, detail: str) -> None:
        label = str(label)
        line = f"criterion {label:>3}: {'PASS' if ok else 'FAIL'}  {detail}"
        CRITERIA[label] = line
        print(line)
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(CRITERIA, key=_order):
        terminalreporter.write_line(CRITERIA[label])
