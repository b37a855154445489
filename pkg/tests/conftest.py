import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from dhlut import maxwell_boltzmann, solve_lambda  # noqa: E402


@pytest.fixture(scope="session")
def ps58():
    """Maxwell-Boltzmann lane distribution at 5.8 bit/symbol."""
    return maxwell_boltzmann(solve_lambda(5.8))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
