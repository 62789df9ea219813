import pytest

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line for the terminal summary and return a checker."""

    def record(name: str, ok: bool, detail: str, seconds: float) -> bool:
        line = f"{'PASS' if ok else 'FAIL'}  {name}  ({seconds:.2f} s)  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
