"""
NSFR balance sheet of the back-to-back book.

ASF = reg_cap + alpha * D
RSF = 1.0 * max(net derivatives - net collateral, 0) + 0.2 * max(derivative liabilities, floor)

Mapping of the book onto the RSF inputs (per path and step, V = client value):

* net derivatives: gross derivative assets |V| (whichever leg is in the money)
  plus the initial margin posted on the hedge, when ``im_in_rsf`` is set
* net collateral: variation margin received on the hedge, max(-V, 0)
* derivative liabilities: the uncollateralised client liability max(-V, 0)

so the 100% term is the unsecured client receivable V+ plus posted initial
margin. Posted variation margin is what the bank funds, not an offset.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .swap import ExposureProfile

DebtRule = Literal["standard", "nsfr_pinned"]

RSF_ASSET_WEIGHT = 1.0
RSF_LIABILITY_WEIGHT = 0.2
REG_CAP_ASF_WEIGHT = 1.0


@dataclass(frozen=True)
class WeightSchedule:
    """ASF weight of debt by maturity bucket.

    Debt of at least six months and under one year gets 0.5, beyond one year
    1.0. Debt of exactly one year takes `one_year_weight`.
    """

    one_year_weight: float = 1.0

    def __post_init__(self):
        if self.one_year_weight not in (0.5, 1.0):
            raise ValueError("one_year_weight must be 0.5 or 1.0")

    def asf_weight(self, maturity: float) -> float:
        if maturity < 0.5 - 1e-12:
            raise ValueError(f"debt maturity {maturity}y is below the 6 month bucket")
        if abs(maturity - 1.0) <= 1e-12:
            return self.one_year_weight
        return 0.5 if maturity < 1.0 else 1.0


@dataclass(frozen=True)
class RegulatoryConfig:
    reg_cap: float
    liability_floor: float = 10_000.0
    im_in_rsf: bool = True
    weights: WeightSchedule = field(default_factory=WeightSchedule)

    def __post_init__(self):
        if self.reg_cap < 0:
            raise ValueError("reg_cap must be >= 0")
        if self.liability_floor <= 0:
            raise ValueError("liability_floor must be > 0")


@dataclass(frozen=True)
class BalanceSheetState:
    """NSFR quantities, each shaped (n_paths, n_points)."""

    reg_cap: float
    alpha: float
    net_derivative_asset: np.ndarray
    net_collateral: np.ndarray
    derivative_liability: np.ndarray
    asf: np.ndarray
    rsf: np.ndarray
    nsfr: np.ndarray
    debt: np.ndarray
    rule: str


def compute_rsf(net_derivatives, net_collateral, derivative_liabilities,
                liability_floor: float = 10_000.0):
    """Required stable funding. The liability input is floored before
    weighting, which keeps RSF (and so NSFR) finite."""
    net = np.maximum(np.asarray(net_derivatives) - np.asarray(net_collateral), 0.0)
    liab = np.maximum(np.asarray(derivative_liabilities), liability_floor)
    out = RSF_ASSET_WEIGHT * net + RSF_LIABILITY_WEIGHT * liab
    return float(out) if np.ndim(out) == 0 else out


def compute_asf(reg_cap, debt, alpha: float):
    if alpha not in (0.5, 1.0):
        raise ValueError("alpha must be 0.5 or 1.0")
    out = REG_CAP_ASF_WEIGHT * np.asarray(reg_cap) + alpha * np.asarray(debt)
    return float(out) if np.ndim(out) == 0 else out


def required_debt(rsf, reg_cap, alpha: float):
    """Debt that brings NSFR to exactly 1, clamped at zero when capital alone
    already covers RSF."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    out = np.maximum((np.asarray(rsf) - REG_CAP_ASF_WEIGHT * np.asarray(reg_cap)) / alpha, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def standard_debt(exposure: ExposureProfile, step: int | None = None):
    """Initial margin plus posted collateral."""
    c = exposure.collateral if step is None else exposure.collateral[:, step]
    return exposure.initial_margin + c


def rsf_inputs(exposure: ExposureProfile, config: RegulatoryConfig):
    """(net derivatives, net collateral, derivative liabilities) for the book."""
    v = exposure.client_value
    im = exposure.initial_margin if config.im_in_rsf else 0.0
    received = np.maximum(-v, 0.0)
    return np.abs(v) + im, received, received


def book_rsf(exposure: ExposureProfile, config: RegulatoryConfig) -> np.ndarray:
    return compute_rsf(*rsf_inputs(exposure, config), config.liability_floor)


def nsfr_series(exposure: ExposureProfile, rule: DebtRule, config: RegulatoryConfig,
                alpha: float) -> BalanceSheetState:
    nd, nc, dl = rsf_inputs(exposure, config)
    rsf = compute_rsf(nd, nc, dl, config.liability_floor)
    if rule == "standard":
        debt = np.broadcast_to(standard_debt(exposure), rsf.shape).copy()
    elif rule == "nsfr_pinned":
        debt = required_debt(rsf, config.reg_cap, alpha)
    else:
        raise ValueError(f"unknown debt rule {rule!r}")
    asf = compute_asf(config.reg_cap, debt, alpha)
    return BalanceSheetState(config.reg_cap, alpha, nd, nc, dl, asf, rsf,
                             asf / rsf, debt, rule)


def expected_series(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-step Monte Carlo mean and standard error."""
    n = values.shape[0]
    dev = values - values[0]
    mean = values[0] + dev.mean(axis=0)
    se = dev.std(axis=0, ddof=1) / np.sqrt(n) if n > 1 else np.zeros_like(mean)
    return mean, se


def nsfr_histogram(nsfr: np.ndarray, buckets: int = 50, lower: float = 0.0,
                   upper: float = 3.0) -> tuple[np.ndarray, np.ndarray]:
    """Counts per (step, bucket): `buckets` uniform bins on [lower, upper)
    plus a final overflow bin. Values below `lower` land in the first bin.

    Returns (edges, counts) with counts shaped (n_points, buckets + 1).
    """
    edges = np.linspace(lower, upper, buckets + 1)
    width = (upper - lower) / buckets
    idx = np.floor((nsfr - lower) / width).astype(np.int64)
    idx = np.clip(idx, 0, buckets)
    counts = np.zeros((nsfr.shape[1], buckets + 1), dtype=np.int64)
    for k in range(nsfr.shape[1]):
        counts[k] = np.bincount(idx[:, k], minlength=buckets + 1)
    return edges, counts
