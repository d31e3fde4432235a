import numpy as np
import pytest

from src.simulation.oracle import marked_oracle


@pytest.fixture
def five_bit_oracle():
    """Single target 01100 on five bits."""
    return marked_oracle(5, '01100')


@pytest.fixture
def twelve_bit_oracle():
    return marked_oracle(12, '111000001111')


@pytest.fixture
def results_dir(tmp_path, monkeypatch):
    """Route default output paths into a temporary directory."""
    monkeypatch.setenv('IDGS_OUTPUT_DIR', str(tmp_path))
    return tmp_path


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
