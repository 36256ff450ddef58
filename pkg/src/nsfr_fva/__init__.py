"""NSFR-consistent funding value adjustment and debt-maturity optimisation."""

from .balance import (RegulatoryConfig, WeightSchedule, compute_asf, compute_rsf,
                      nsfr_series, required_debt, standard_debt)
from .config import ConfigError, ScenarioConfig, from_dict, load
from .fva import FundingQuote, FvaResult, fca, fva1, fva2, price_all
from .optimizer import PolicyGraph, FundingPolicy, brute_force, build_graph, solve
from .ratesim import (TimeGrid, VasicekParams, discount_factor, simulate_paths,
                      zero_coupon_bond_price)
from .swap import SwapSpec, build_exposure, value_swap

__version__ = "0.1.0"
