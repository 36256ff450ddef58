import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nsfr_fva.balance import RegulatoryConfig
from nsfr_fva.config import ScenarioConfig
from nsfr_fva.fva import FundingQuote, MCEstimate, fca, fva1, fva2, path_mean, price_all, price_book
from nsfr_fva.ratesim import PathSet, TimeGrid, discount_factors
from nsfr_fva.swap import SwapSpec, build_exposure

from conftest import constant_rates, flat_params

QUOTE = FundingQuote(maturity=1.0, spread=0.0051, alpha=1.0)


@pytest.fixture
def one_year():
    grid = TimeGrid.uniform(1.0, 12, 2)
    return grid, PathSet(constant_rates(0.01, grid, 3), grid)


def test_fva1_zero_cases(one_year):
    grid, paths = one_year
    debt = np.full(paths.rates.shape, 1e6)
    assert fva1(paths, debt, FundingQuote(1.0, 0.0, 1.0), grid).value == 0.0
    assert fva1(paths, np.zeros_like(debt), QUOTE, grid).value == 0.0


def test_fva1_closed_form(one_year):
    grid, paths = one_year
    debt = np.full(paths.rates.shape, 1e6)
    oracle = sum(math.exp(-0.0151 * k / 12) * 0.0051 * 1e6 / 12 for k in range(12))
    est = fva1(paths, debt, QUOTE, grid)
    assert est.value == pytest.approx(oracle, rel=1e-13)
    assert est.stderr == 0.0


def test_fva2_closed_form(one_year):
    grid, paths = one_year
    coll = np.full(paths.rates.shape, 2e6)
    debt = np.full(paths.rates.shape, 0.5e6)
    oracle = sum(math.exp(-0.0151 * k / 12) * 0.0051 * 1.5e6 / 12 for k in range(12))
    assert fva2(paths, debt, coll, QUOTE, grid).value == pytest.approx(oracle, rel=1e-13)


def test_fva2_vanishes_when_debt_covers_collateral(one_year):
    grid, paths = one_year
    coll = np.full(paths.rates.shape, 2e6)
    assert fva2(paths, coll, coll, QUOTE, grid).value == 0.0
    assert fva2(paths, coll + 1, coll, QUOTE, grid).value == 0.0
    q = FundingQuote(1.0, 0.0051, 1.0, shortfall_spread=0.0)
    assert fva2(paths, np.zeros_like(coll), coll, q, grid).value == 0.0


def test_fca_zero_cases(one_year):
    grid, paths = one_year
    neg = np.full(paths.rates.shape, -1e6)
    assert fca(paths, neg, QUOTE, grid).value == 0.0
    assert fca(paths, -neg, FundingQuote(1.0, 0.0, 1.0), grid).value == 0.0


def test_fca_on_swap_exposure(monthly_grid):
    # flat 3% curve, swap value from the bond decomposition, hand-discounted sum
    from test_swap import hand_value
    spec = SwapSpec()
    rates = constant_rates(0.03, monthly_grid, 2)
    exp = build_exposure(spec, flat_params(0.03), rates, monthly_grid, 0.0)
    paths = PathSet(rates, monthly_grid)
    oracle = sum(math.exp(-(0.03 + 0.0051) * k / 12) * 0.0051
                 * max(hand_value(0.03, k / 12), 0.0) / 12 for k in range(60))
    assert fca(paths, exp.client_value, QUOTE, monthly_grid).value == pytest.approx(oracle, rel=1e-11)


def test_shape_mismatch_rejected(one_year):
    grid, paths = one_year
    with pytest.raises(ValueError):
        fva1(paths, np.zeros((2, 13)), QUOTE, grid)
    with pytest.raises(ValueError):
        fva2(paths, np.zeros((3, 13)), np.zeros((3, 12)), QUOTE, grid)


def test_quote_validation():
    with pytest.raises(ValueError):
        FundingQuote(1.0, -0.001, 1.0)
    with pytest.raises(ValueError):
        FundingQuote(1.0, 0.001, 0.7)
    assert FundingQuote(0.5, 0.0, 0.5).label == "6m"
    assert FundingQuote(2.0, 0.0, 1.0).label == "2y"


def test_path_mean():
    est = path_mean(np.array([1.0, 2.0, 3.0, 4.0]))
    assert isinstance(est, MCEstimate)
    assert est.value == 2.5
    assert est.stderr == pytest.approx(np.std([1, 2, 3, 4], ddof=1) / 2)


@settings(max_examples=25, deadline=None)
@given(s_lo=st.floats(0.0, 0.02), ds=st.floats(0.0, 0.02), seed=st.integers(0, 1000))
def test_fva1_monotone_in_spread_at_fixed_discount(s_lo, ds, seed):
    grid = TimeGrid.uniform(2.0, 12, 2)
    rng = np.random.default_rng(seed)
    paths = PathSet(rng.normal(0.01, 0.01, (30, 25)), grid)
    debt = rng.uniform(0, 5e6, (30, 25))
    disc = discount_factors(paths, grid, 0.005)
    lo = fva1(paths, debt, FundingQuote(1.0, s_lo, 1.0), grid, discount=disc).value
    hi = fva1(paths, debt, FundingQuote(1.0, s_lo + ds, 1.0), grid, discount=disc).value
    assert hi >= lo >= 0


def test_price_all_additive_and_nonnegative(small_config):
    res = price_all(small_config)
    assert res.fva_total == res.fva1 + res.fva2
    assert min(res.fva1, res.fva2, res.fca_baseline) >= 0
    assert res.n_paths == 2000
    assert res.se_fva_total > 0 and res.se_fca_baseline > 0


def test_price_all_fva_exceeds_fca_when_pinned_debt_dominates(small_config):
    # alpha = 0.5 with the default book: standard NSFR < 1 everywhere, so the
    # pinned debt is pathwise larger than the standard debt
    cfg = small_config.replace(**{"quotes": [{"maturity": 0.5, "spread": 0.0051}]})
    book = cfg.simulate()
    reg = cfg.regulatory()
    from nsfr_fva.balance import nsfr_series
    std = nsfr_series(book.exposure, "standard", reg, 0.5)
    pin = nsfr_series(book.exposure, "nsfr_pinned", reg, 0.5)
    assert np.all(pin.debt >= std.debt)
    res = price_all(cfg)
    assert res.fva_total >= res.fca_baseline


def test_zero_vol_collapses_to_single_path():
    base = ScenarioConfig().replace(**{"rates.volatility": 0.0, "rates.n_paths": 1})
    one = price_all(base)
    many = price_all(base.replace(**{"rates.n_paths": 5000}))
    for name in ("fva1", "fva2", "fva_total", "fca_baseline"):
        assert getattr(many, name) == pytest.approx(getattr(one, name), rel=1e-12, abs=1e-12)
    assert many.se_fva_total == 0.0


def test_doubling_paths_moves_estimate_within_noise():
    cfg = ScenarioConfig().replace(**{"rates.n_paths": 5000})
    a = price_all(cfg)
    b = price_all(cfg.replace(**{"rates.n_paths": 10000}))
    tol = 3 * math.hypot(a.se_fva_total, b.se_fva_total)
    assert abs(a.fva_total - b.fva_total) < tol
    tol = 3 * math.hypot(a.se_fca_baseline, b.se_fca_baseline)
    assert abs(a.fca_baseline - b.fca_baseline) < tol


def test_price_book_matches_components(small_config):
    book = small_config.simulate()
    reg = RegulatoryConfig(0.0)
    res = price_book(book.paths, book.exposure, book.grid, reg, QUOTE)
    assert res.fva2 == 0.0
