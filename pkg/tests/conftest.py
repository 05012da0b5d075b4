import pytest

from corrclust import _backend


@pytest.fixture(params=_backend.AVAILABLE)
def backend(request):
    """Run the test once per available kernel backend."""
    previous = _backend.select(request.param)
    yield request.param
    _backend.select(previous)


_VERDICTS = []


@pytest.fixture
def verdict():
    """Record one pass/fail line for the acceptance summary, then assert it."""

    def record(label, passed, detail):
        line = f"{label}: {'PASS' if passed else 'FAIL'} | {detail}"
        _VERDICTS.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
