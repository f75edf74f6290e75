import math
import warnings

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

warnings.filterwarnings("ignore", message="The TBB threading layer")

# parameters shared across modules
FREE_XI = "2*(5+sqrt(2))/23"          # 2 theta* of the MUPO-free example
STICKY_THETA = "871/2500"


@pytest.fixture
def free_rho():
    return math.cos((5 + math.sqrt(2)) * math.pi / 23)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
