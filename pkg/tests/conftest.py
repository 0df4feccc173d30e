import math

import pytest

from gouysplit.modes import BeamParams
from gouysplit.spdc import derive_geometry

LAMBDA_P = 405e-9
LAMBDA_S = 780e-9
W0 = 1e-4


@pytest.fixture
def params():
    return BeamParams(LAMBDA_P, W0)


@pytest.fixture
def lab_geometry():
    return derive_geometry(LAMBDA_P, LAMBDA_S, 0.6, 0.6)


def z_for(z_norm):
    return z_norm * math.pi * W0**2 / LAMBDA_P


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
