import pytest

_LINES = []


@pytest.fixture
def criterion():
    """Record one acceptance line; call as ``criterion(number, passed, detail)``."""

    def record(number, passed, detail):
        _LINES.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")
        print(_LINES[-1])
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
