import pytest

from safeplan.domains import example_trajectory, logistics_3loc


@pytest.fixture
def logistics():
    return logistics_3loc()


@pytest.fixture
def t1(logistics):
    return example_trajectory(logistics)


@pytest.fixture
def named(logistics):
    """Shorthand: named(TruckAt="A", PackageAt="B") -> state tuple."""

    def make(**kw):
        return logistics.state(kw)

    return make


# criterion number -> (passed, summary); filled by the acceptance suite
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, summary = ACCEPTANCE[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'} criterion {number:>2}: {summary}")
