import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.acceptance.suite import random_step_function


@pytest.fixture
def rng():
    """Seeded generator so every test run sees the same samples"""
    return np.random.default_rng(20240517)


@pytest.fixture
def make_function(rng):
    """Factory for random admissible 1-D step functions"""
    def factory(max_cells=10, radius=0.45, lo=0.0, hi=1.0):
        return random_step_function(rng, max_cells=max_cells, radius=radius, lo=lo, hi=hi)

    return factory


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs the full acceptance suite")
