import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nfchan.geometry import SPEED_OF_LIGHT
from nfchan.scenario import load_scenario

settings.register_profile("nfchan", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("nfchan")

F28 = 28e9
LAM28 = SPEED_OF_LIGHT / F28
K28 = 2 * np.pi / LAM28


@pytest.fixture(scope="session")
def va():
    return load_scenario("reflection_28ghz")


@pytest.fixture(scope="session")
def vb():
    return load_scenario("downlink_60ghz")
