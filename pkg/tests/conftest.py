import numpy as np
import pytest

from lckhopf.charts import HopfData
from lckhopf.hopf import build_forms_and_metric

# Filled by test_acceptance.py; printed once at the end of the session.
ACCEPTANCE_LINES = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture(scope="module")
def hopf2():
    return build_forms_and_metric(HopfData(2, (1.0, 2.0), 0.8, (1.0, np.exp(0.7j))))


@pytest.fixture(scope="module")
def hopf3():
    return build_forms_and_metric(HopfData(3, (0.5, 1.0, 2.3), 1.1, (np.exp(0.2j), -1.0, 1j)))


@pytest.fixture
def cyl_points(hopf2, rng):
    return hopf2.chart.sample(rng, 40)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
