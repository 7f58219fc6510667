import math

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ccaphoton import ModelParams, Momentum2

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

K_REF = Momentum2(math.pi / 8, math.pi / 4)

angles = st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False)
open_kx = st.floats(min_value=0.05, max_value=math.pi - 0.05)
periods = st.integers(min_value=1, max_value=5)
hoppings = st.floats(min_value=0.2, max_value=3.0)
couplings = st.floats(min_value=0.1, max_value=10.0)


@pytest.fixture
def k_ref():
    return K_REF


@pytest.fixture
def two_layer_ref():
    """Two layers, Omega = (7, 5), x2 - x1 = 7, d = 3."""
    return ModelParams.two_layer(7.0, 5.0, x1=0, x2=7, d=3)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    order = [name for name, _ in mod.CRITERIA]
    for name in order:
        if name in results:
            ok, detail = results[name]
            terminalreporter.write_line(f"{name:4s} {'PASS' if ok else 'FAIL'}  {detail}")
