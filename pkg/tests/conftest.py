import numpy as np
import pytest

from nsfr_fva.config import QuoteConfig, ScenarioConfig
from nsfr_fva.ratesim import TimeGrid, VasicekParams


def flat_params(r):
    """Zero vol, zero mean reversion: the short rate stays at r."""
    return VasicekParams(r0=r, a=0.0, b=r, sigma=0.0)


@pytest.fixture
def monthly_grid():
    return TimeGrid.uniform(5.0, 12, 2)


@pytest.fixture
def small_config():
    return ScenarioConfig().replace(**{"rates.n_paths": 2000})


@pytest.fixture
def three_quotes():
    return [QuoteConfig(0.5, 0.005), QuoteConfig(1.0, 0.0051), QuoteConfig(2.0, 0.0052)]


def constant_rates(r, grid, n_paths=1):
    return np.full((n_paths, len(grid)), r)
