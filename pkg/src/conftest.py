"""Shared fixtures for the test modules in src/."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

TEST_SEED = 20240617


@pytest.fixture
def rng():
    return np.random.default_rng(TEST_SEED)
