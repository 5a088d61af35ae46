import pytest

from ulabeam.geometry import uniform_linear

_acceptance = {}


@pytest.fixture
def pair():
    """The two-element, 8.4 cm prototype array."""
    return uniform_linear(2, 0.084, 343.0)


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or (call.when != "call" and call.excinfo is None):
        return
    number, title = marker.args
    ok = call.excinfo is None or call.excinfo.errisinstance(pytest.skip.Exception)
    entry = _acceptance.setdefault(number, {"title": title, "ok": True, "tests": []})
    entry["ok"] &= ok
    entry["tests"].append((item.name, ok))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_acceptance):
        e = _acceptance[number]
        tr.write_line(f"[{'PASS' if e['ok'] else 'FAIL'}] AC{number}: {e['title']}")
        for name, ok in e["tests"]:
            if not ok:
                tr.write_line(f"         failed: {name}")
