import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

FIXTURES = __import__("pathlib").Path(__file__).parent / "fixtures"


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / f"{name}.json")


ACCEPTANCE_RESULTS = {}


def pytest_runtest_makereport(item, call):
    number = getattr(item.function, "criterion", None)
    if number is not None and call.when == "call":
        ok = call.excinfo is None
        elapsed = call.stop - call.start
        ACCEPTANCE_RESULTS[number] = (ok, elapsed, item.function.limit, item.function.__doc__ or "")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, elapsed, limit, doc = ACCEPTANCE_RESULTS[number]
        title = doc.strip().splitlines()[0] if doc.strip() else ""
        terminalreporter.write_line(
            f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {elapsed:6.2f}s / {limit:g}s  {title}"
        )
