import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tlmls.frame import build_minimal_mc
from tlmls.tzitzeica import GoursatData, rp_omega, solve_goursat

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def rp_field(n, side=0.5):
    u = np.linspace(0, side, n + 1)
    w = rp_omega(u, u)
    return solve_goursat(GoursatData.build((0, side, 0, side), n, n, w[:, 0], w[0, :], 0.0, 0.0))


def clifford_field(n, side=1.0):
    return solve_goursat(GoursatData.build((0, side, 0, side), n, n, 0.0, 0.0, 1.0, -1.0))


def injected_field(n, c=0.1, side=0.5):
    """omega = 0 with constant l_im = m_im = c; r = -(1 - c^2) keeps the data compatible."""
    return solve_goursat(GoursatData.build((0, side, 0, side), n, n, 0.0, 0.0, 1.0,
                                           -(1 - c * c), c, c))


@pytest.fixture(scope="session")
def rp64():
    return rp_field(64)


@pytest.fixture(scope="session")
def clifford64():
    return clifford_field(64)


@pytest.fixture(scope="session")
def clifford128():
    return clifford_field(128)


@pytest.fixture(scope="session")
def rp_mc64(rp64):
    return build_minimal_mc(rp64)
