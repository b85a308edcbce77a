import pytest

_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record (criterion, passed, detail) for the end-of-run summary."""

    def record(criterion, passed, detail):
        _ACCEPTANCE.append((criterion, bool(passed), detail))
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        tr.write_line(f"{'PASS' if passed else 'FAIL'}  {criterion}: {detail}")
