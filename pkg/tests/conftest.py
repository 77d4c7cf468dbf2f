import pytest

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a one-line verdict; all verdicts are printed at the end of the run."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _LINES.append(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_LINES):
            terminalreporter.write_line(line)
