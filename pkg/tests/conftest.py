import math
import os
import sys

import pytest
from hypothesis import HealthCheck, settings, strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from quasibic.model import SystemParams  # noqa: E402

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def ref_array():
    """Reference array: N=7, J0=2.2 Gamma, phi=0.2 pi."""
    return SystemParams(N=7, J0=2.2, phi=0.2 * math.pi)


@pytest.fixture
def single():
    return SystemParams(N=1)


odd_N = st.sampled_from([1, 3, 5, 7, 9, 11])
J0s = st.floats(0.2, 5.0)
phis = st.floats(0.02 * math.pi, 0.98 * math.pi)
losses = st.floats(0.0, 1.0)


@st.composite
def system_params(draw, loss=losses, N=odd_N):
    return SystemParams(N=draw(N), J0=draw(J0s), phi=draw(phis), Gamma_f=draw(loss))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS, key=lambda k: (int("".join(c for c in k if c.isdigit())), k)):
        terminalreporter.write_line(mod.RESULTS[key])
