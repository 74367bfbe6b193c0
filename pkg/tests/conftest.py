import time
from pathlib import Path

import pytest

from ntpetri import gallery

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def water():
    return gallery.water()


@pytest.fixture
def pipeline():
    return gallery.voice_pipeline()


ACCEPTANCE: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body sets ``rec.detail``."""

    class Record:
        detail = ""
        budget = 10.0  # seconds

    rec = Record()
    began = time.perf_counter()
    yield rec
    elapsed = time.perf_counter() - began
    label = request.node.get_closest_marker("acceptance").args[0]
    failed = getattr(request.node, "rep_call", None) is None or request.node.rep_call.failed
    slow = elapsed > rec.budget
    ACCEPTANCE.append((label, not (failed or slow),
                       f"{rec.detail} [{elapsed:.2f}s, budget {rec.budget:.0f}s]"))
    assert not slow, f"{label} took {elapsed:.1f}s, over its {rec.budget:.0f}s budget"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")
