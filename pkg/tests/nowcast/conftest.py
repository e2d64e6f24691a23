"""Shared fixtures for nowcasting harness tests."""

import numpy as np
import pytest

from sparsedfm.config.options import FitConfig
from sparsedfm.statespace.simulate import simulate_dfm

CODES = (2,) + (1,) * 9
LAGS = (2,) + (0,) * 9


def level_panel(sim):
    """Cumulate the first series so it needs a first difference."""
    values = np.array(sim.panel.values)
    values[:, 0] = 100.0 + np.cumsum(values[:, 0])
    return sim.panel.with_values(values)


@pytest.fixture(scope="module")
def levels():
    """60 rows, target in column 0 published two months late."""
    return level_panel(simulate_dfm(n=60, p=10, r=2, seed=3))


@pytest.fixture
def make_config():
    """HarnessConfig factory with the level panel's codes and lags."""
    from sparsedfm.nowcast import HarnessConfig

    def _make(models=None, start=50, end=54, **kwargs):
        if models is None:
            models = {"2Stage": FitConfig(r=2, alg="2Stage")}
        return HarnessConfig(
            targets=(0,),
            lags=LAGS,
            codes=CODES,
            start=start,
            end=end,
            models=models,
            **kwargs,
        )

    return _make
