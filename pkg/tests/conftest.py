import pytest

from hgbench import _backend

ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture(params=sorted(_backend.available()))
def kern(request):
    """Each importable kernel module in turn."""
    return _backend.available()[request.param]


@pytest.fixture
def record():
    def _record(name, ok, detail=""):
        ACCEPTANCE[name] = (bool(ok), detail)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
