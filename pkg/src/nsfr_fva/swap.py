"""Client swap valuation by bond decomposition, and the hedge exposure it induces.

The bank faces a client on an uncollateralised fixed-for-floating swap and
hedges it back-to-back with the interbank under a CSA. Collateral is posted
on the hedge whenever the hedge is a liability, which by the back-to-back
identity is whenever the client trade is an asset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ratesim import PathSet, RatePath, TimeGrid, VasicekParams, zero_coupon_bond_price


@dataclass(frozen=True)
class SwapSpec:
    notional: float = 100e6
    fixed_rate: float = 0.02
    maturity: float = 5.0
    pay_fixed: bool = True
    payment_frequency: int = 2

    def __post_init__(self):
        if self.notional <= 0:
            raise ValueError("notional must be > 0")
        if self.maturity <= 0:
            raise ValueError("maturity must be > 0")
        if self.payment_frequency < 1:
            raise ValueError("payment_frequency must be >= 1")
        n = self.maturity * self.payment_frequency
        if abs(n - round(n)) > 1e-9:
            raise ValueError("maturity must be a whole number of payment periods")

    @property
    def accrual(self) -> float:
        return 1.0 / self.payment_frequency

    @property
    def n_payments(self) -> int:
        return int(round(self.maturity * self.payment_frequency))

    @property
    def payment_times(self) -> np.ndarray:
        return np.arange(1, self.n_payments + 1) * self.accrual


@dataclass(frozen=True)
class ExposureProfile:
    """Per-path, per-step values from the bank's side."""

    client_value: np.ndarray
    hedge_value: np.ndarray
    collateral: np.ndarray
    initial_margin: float

    @property
    def n_paths(self) -> int:
        return self.client_value.shape[0]


def _payment_indices(spec: SwapSpec, grid: TimeGrid) -> np.ndarray:
    """Grid indices of the swap's payment dates, with index 0 prepended as
    the first reset."""
    times = np.concatenate([[0.0], spec.payment_times])
    idx = np.searchsorted(grid.step_times, times - 1e-12)
    ok = (idx < len(grid)) & np.isclose(grid.step_times[np.minimum(idx, len(grid) - 1)], times)
    if not ok.all() or abs(grid.maturity - spec.maturity) > 1e-12:
        raise ValueError("swap payment dates do not lie on the simulation grid")
    return idx


def _swap_values(spec: SwapSpec, params: VasicekParams, rates: np.ndarray,
                 grid: TimeGrid, steps) -> np.ndarray:
    """Receive-floating values for every row of `rates` at each of `steps`."""
    pay_idx = _payment_indices(spec, grid)
    pay_t = spec.payment_times
    coupon = spec.notional * spec.fixed_rate * spec.accrual
    out = np.zeros((rates.shape[0], len(steps)))
    for col, k in enumerate(steps):
        t = grid.step_times[k]
        # a payment falling exactly on t has already been exchanged
        live = np.nonzero(pay_idx[1:] > k)[0]
        if live.size == 0:
            continue
        r_now = rates[:, k]
        taus = pay_t[live] - t
        dfs = np.stack([zero_coupon_bond_price(params, r_now, tau) for tau in taus], axis=1)
        fixed_leg = coupon * dfs.sum(axis=1) + spec.notional * dfs[:, -1]
        # floating coupon for the running period was fixed at its reset date
        reset = pay_idx[live[0]]
        p_reset = zero_coupon_bond_price(params, rates[:, reset], spec.accrual)
        float_leg = spec.notional / p_reset * dfs[:, 0]
        out[:, col] = float_leg - fixed_leg
    return out if spec.pay_fixed else -out


def value_swap(spec: SwapSpec, params: VasicekParams, path: RatePath,
               grid: TimeGrid, step: int) -> float:
    """Mark-to-market of the client swap to the bank at grid index `step`.

    Positive when the bank pays fixed and rates sit above the fixed rate.
    """
    if not 0 <= step < len(grid):
        raise IndexError(f"step {step} is past maturity or outside the grid")
    rates = np.asarray(path.rates if isinstance(path, RatePath) else path, dtype=float)
    return float(_swap_values(spec, params, rates[None, :], grid, [step])[0, 0])


def swap_values(spec: SwapSpec, params: VasicekParams, paths, grid: TimeGrid) -> np.ndarray:
    """Client swap value on every path at every grid point."""
    rates = paths.rates if isinstance(paths, PathSet) else np.atleast_2d(
        paths.rates if isinstance(paths, RatePath) else paths)
    return _swap_values(spec, params, rates, grid, range(len(grid)))


def build_exposure(spec: SwapSpec, params: VasicekParams, paths, grid: TimeGrid,
                   im_fraction: float = 0.01) -> ExposureProfile:
    if im_fraction < 0:
        raise ValueError("im_fraction must be >= 0")
    client = swap_values(spec, params, paths, grid)
    hedge = -client
    collateral = np.maximum(-hedge, 0.0)
    for arr in (client, hedge, collateral):
        arr.setflags(write=False)
    return ExposureProfile(client, hedge, collateral, im_fraction * spec.notional)
