import math

import numpy as np
import pytest

from qutrit_qkd.rates import SystemParams


def within_4se(freq: float, p: float, n: int) -> bool:
    """|freq - p| within four binomial standard errors of p at sample size n."""
    return abs(freq - p) <= 4.0 * math.sqrt(p * (1.0 - p) / n)


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


@pytest.fixture
def default_params():
    """Default operating point: standard fiber plus the baseline detector set."""
    return SystemParams(
        alpha_db_per_km=0.2,
        length_km=20.0,
        gamma_b=0.5,
        eta=0.1,
        p_d=1e-5,
        q_opt=0.005,
        mu=0.1,
    )


@pytest.fixture
def lossless_params():
    """No channel loss, no dark counts, no misalignment."""
    return SystemParams(
        alpha_db_per_km=0.2,
        length_km=0.0,
        gamma_b=1.0,
        eta=1.0,
        p_d=0.0,
        q_opt=0.0,
        mu=0.5,
    )
