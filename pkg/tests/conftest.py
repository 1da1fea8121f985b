import pytest

_LINES = []


@pytest.fixture
def report():
    """Record one acceptance line; they are repeated in the terminal summary."""

    def record(number: int, passed: bool, detail: str) -> None:
        line = f"ACCEPTANCE {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        print(line)
        _LINES.append((number, line))

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
