import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from drinfeld_forms.series import series_ground

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile("default")

# (criterion number, part) -> (title, passed, note), filled in by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        title, passed, note = ACCEPTANCE[key]
        line = f"{key[0]:>2}{key[1]}. {title}: {'PASS' if passed else 'FAIL'}"
        if note:
            line += f" ({note})"
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def g2():
    return series_ground(2, 1, 2, 2, 60)


@pytest.fixture(scope="session")
def g3():
    return series_ground(3, 1, 2, 2, 60)
