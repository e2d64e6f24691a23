"""Shared fixtures for statespace tests."""

import numpy as np
import pytest

from sparsedfm.statespace.params import DfmParams


@pytest.fixture
def params():
    """Three series on two factors."""
    return DfmParams(
        Lambda=[[1.0, 0.0], [0.5, 0.5], [0.0, 1.0]],
        A=[[0.5, 0.1], [0.0, 0.3]],
        Sigma_u=np.eye(2),
        sigma_eps=[1.0, 0.5, 2.0],
        alpha0=[0.0, 0.0],
        P0=np.eye(2),
    )
