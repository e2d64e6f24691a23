"""Shared fixtures for sparsedfm tests."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add the src directory to the path so we can import sparsedfm
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from sparsedfm.data.panel import TimePanel  # noqa: E402
from sparsedfm.statespace.simulate import simulate_dfm  # noqa: E402


@pytest.fixture
def temp_home_dir(tmp_path, monkeypatch):
    """Create a temporary home directory for testing."""
    monkeypatch.setenv("HOME", str(tmp_path))

    # Mock Path.home() to return the temporary path
    monkeypatch.setattr(Path, "home", lambda: tmp_path)

    (tmp_path / ".sparsedfm").mkdir(exist_ok=True)
    return tmp_path


@pytest.fixture(autouse=True)
def single_thread(monkeypatch):
    """Keep worker pools deterministic unless a test says otherwise."""
    monkeypatch.delenv("SPARSEDFM_THREADS", raising=False)


@pytest.fixture
def sim():
    """Complete 100×20 panel with two factors."""
    return simulate_dfm(n=100, p=20, r=2, seed=1)


@pytest.fixture
def sim_missing():
    """The same design with 10% of cells removed."""
    return simulate_dfm(n=100, p=20, r=2, seed=1, missing_frac=0.1)


@pytest.fixture
def small_panel():
    """A tiny hand-written panel with one gap."""
    values = np.array(
        [
            [1.0, 2.0, 0.5],
            [2.0, np.nan, 0.1],
            [3.0, 1.0, -0.4],
            [4.0, 3.0, 0.2],
            [5.0, 2.5, 0.0],
            [6.0, 4.0, 0.3],
        ]
    )
    return TimePanel.from_array(values, names=["a", "b", "c"])
