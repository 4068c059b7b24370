import pytest

from cardytest.cache import RhoCache

_criteria = []


@pytest.fixture(scope="session")
def cache():
    """One in-memory radius cache shared by the whole session."""
    return RhoCache()


@pytest.fixture
def report():
    """Record a pass/fail line for an acceptance criterion."""

    def _report(label, ok, detail):
        _criteria.append((label, bool(ok), detail))
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}: {detail}")
