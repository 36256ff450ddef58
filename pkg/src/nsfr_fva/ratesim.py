"""
Vasicek short-rate simulation on a fixed time grid.

The short rate follows an Ornstein-Uhlenbeck process

    dr(t) = a (b - r(t)) dt + sigma dW(t)

and is sampled with the exact conditional Gaussian transition, so the grid
spacing introduces no discretisation bias in the marginal distributions.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

# Paths are drawn in fixed-size blocks; block b always uses substream b of
# the master seed, so results do not depend on the number of workers.
BLOCK_SIZE = 2048


@dataclass(frozen=True)
class TimeGrid:
    """Simulation grid in year fractions with the payment dates marked."""

    step_times: np.ndarray
    payment_indices: tuple[int, ...]

    def __post_init__(self):
        times = np.asarray(self.step_times, dtype=float)
        if times.ndim != 1 or times.size < 2:
            raise ValueError("time grid needs at least two points")
        if times[0] != 0.0:
            raise ValueError("time grid must start at 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("time grid must be strictly increasing")
        idx = tuple(int(i) for i in self.payment_indices)
        if any(i < 0 or i >= times.size for i in idx):
            raise ValueError("payment index outside the grid")
        if list(idx) != sorted(set(idx)):
            raise ValueError("payment indices must be strictly increasing")
        if idx[0] != 0 or idx[-1] != times.size - 1:
            raise ValueError("first and last grid points must be payment dates")
        times.setflags(write=False)
        object.__setattr__(self, "step_times", times)
        object.__setattr__(self, "payment_indices", idx)

    @classmethod
    def uniform(cls, maturity: float, steps_per_year: int = 12,
                payments_per_year: int = 2) -> "TimeGrid":
        """Uniform grid with `steps_per_year` steps and payment dates every
        1/payments_per_year years."""
        if steps_per_year % payments_per_year:
            raise ValueError("steps_per_year must be a multiple of payments_per_year")
        n_steps = maturity * steps_per_year
        if n_steps < 1 or abs(n_steps - round(n_steps)) > 1e-9:
            raise ValueError("maturity must be a whole number of grid steps")
        n_steps = int(round(n_steps))
        times = np.arange(n_steps + 1) / steps_per_year
        stride = steps_per_year // payments_per_year
        if n_steps % stride:
            raise ValueError("maturity must be a whole number of payment periods")
        return cls(times, tuple(range(0, n_steps + 1, stride)))

    @property
    def maturity(self) -> float:
        return float(self.step_times[-1])

    @property
    def dt(self) -> np.ndarray:
        return np.diff(self.step_times)

    @property
    def n_steps(self) -> int:
        return self.step_times.size - 1

    def __len__(self) -> int:
        return self.step_times.size


@dataclass(frozen=True)
class VasicekParams:
    r0: float
    a: float = 0.5
    b: float = 0.01
    sigma: float = 0.01

    def __post_init__(self):
        if self.a < 0:
            raise ValueError("mean reversion speed a must be >= 0")
        if self.sigma < 0:
            raise ValueError("volatility sigma must be >= 0")


@dataclass(frozen=True)
class RatePath:
    rates: np.ndarray
    path_id: int = 0


@dataclass(frozen=True)
class PathSet:
    """All simulated paths as one (n_paths, n_points) array."""

    rates: np.ndarray
    grid: TimeGrid
    seed: int | None = None
    params: VasicekParams | None = field(default=None, compare=False)

    def __post_init__(self):
        rates = np.atleast_2d(np.asarray(self.rates, dtype=float))
        if rates.shape[1] != len(self.grid):
            raise ValueError("paths and grid have different lengths")
        rates.setflags(write=False)
        object.__setattr__(self, "rates", rates)

    def __len__(self) -> int:
        return self.rates.shape[0]

    def __getitem__(self, i: int) -> RatePath:
        return RatePath(self.rates[i], path_id=i)

    def __iter__(self) -> Iterator[RatePath]:
        return (self[i] for i in range(len(self)))


def _transition(a: float, b: float, sigma: float, dt: np.ndarray):
    """Per-step decay factor, mean shift and standard deviation of the exact
    OU transition."""
    if a == 0.0:
        return np.ones_like(dt), np.zeros_like(dt), sigma * np.sqrt(dt)
    decay = np.exp(-a * dt)
    shift = b * (-np.expm1(-a * dt))
    std = sigma * np.sqrt(-np.expm1(-2.0 * a * dt) / (2.0 * a))
    return decay, shift, std


def _simulate_block(params: VasicekParams, grid: TimeGrid, seed: int,
                    block: int, n_rows: int) -> np.ndarray:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(block,))
    rng = np.random.Generator(np.random.PCG64(ss))
    z = rng.standard_normal((n_rows, grid.n_steps))
    decay, shift, std = _transition(params.a, params.b, params.sigma, grid.dt)
    out = np.empty((n_rows, len(grid)))
    out[:, 0] = params.r0
    for k in range(grid.n_steps):
        out[:, k + 1] = out[:, k] * decay[k] + shift[k] + std[k] * z[:, k]
    return out


def simulate_paths(params: VasicekParams, grid: TimeGrid, n_paths: int,
                   seed: int, workers: int = 1) -> PathSet:
    """Simulate `n_paths` Vasicek short-rate paths on `grid`.

    Path i is row i % BLOCK_SIZE of block i // BLOCK_SIZE, and each block
    draws from its own spawned substream of `seed`. Output is therefore
    bit-identical for any `workers`, and the first n paths of a larger run
    equal an n-path run.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    if not isinstance(grid, TimeGrid):
        raise TypeError("grid must be a TimeGrid")
    rates = np.empty((n_paths, len(grid)))
    blocks = [(b, min(BLOCK_SIZE, n_paths - b * BLOCK_SIZE))
              for b in range(math.ceil(n_paths / BLOCK_SIZE))]

    def fill(job):
        b, rows = job
        lo = b * BLOCK_SIZE
        rates[lo:lo + rows] = _simulate_block(params, grid, seed, b, rows)

    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, blocks))
    else:
        for job in blocks:
            fill(job)
    return PathSet(rates, grid, seed, params)


def vasicek_mean(params: VasicekParams, t):
    """E[r(t)] given r(0) = r0."""
    t = np.asarray(t, dtype=float)
    return params.b + (params.r0 - params.b) * np.exp(-params.a * t)


def vasicek_variance(params: VasicekParams, t):
    """Var[r(t)] given r(0) = r0."""
    t = np.asarray(t, dtype=float)
    if params.a == 0.0:
        return params.sigma ** 2 * t
    return params.sigma ** 2 * -np.expm1(-2.0 * params.a * t) / (2.0 * params.a)


def integrated_rate(rates, grid: TimeGrid, spread: float = 0.0) -> np.ndarray:
    """Left-point running integral of r + spread, one column per grid point
    (column 0 is zero)."""
    rates = np.asarray(rates, dtype=float)
    incr = (rates[..., :-1] + spread) * grid.dt
    out = np.zeros(rates.shape)
    np.cumsum(incr, axis=-1, out=out[..., 1:])
    return out


def discount_factors(paths, grid: TimeGrid, spread: float = 0.0) -> np.ndarray:
    """exp(-integral of (r + spread)) at every grid point of every path."""
    rates = paths.rates if isinstance(paths, PathSet) else paths
    return np.exp(-integrated_rate(rates, grid, spread))


def discount_factor(path: RatePath, grid: TimeGrid, spread: float,
                    to_index: int) -> float:
    if not 0 <= to_index < len(grid):
        raise IndexError(f"grid index {to_index} out of range")
    rates = np.asarray(path.rates if isinstance(path, RatePath) else path)
    dt = grid.dt[:to_index]
    return float(np.exp(-np.sum((rates[:to_index] + spread) * dt)))


def zero_coupon_bond_price(params: VasicekParams, r_now, tau):
    """Vasicek affine zero-coupon bond price P = exp(A(tau) - B(tau) r).

    With a == 0 the limits B = tau and A = sigma^2 tau^3 / 6 are used.
    """
    tau = np.asarray(tau, dtype=float)
    if np.any(tau < 0):
        raise ValueError("tau must be >= 0")
    a, b, s2 = params.a, params.b, params.sigma ** 2
    if a == 0.0:
        big_b = tau
        big_a = s2 * tau ** 3 / 6.0
    else:
        big_b = -np.expm1(-a * tau) / a
        big_a = ((big_b - tau) * (a * a * b - 0.5 * s2) / (a * a)
                 - s2 * big_b ** 2 / (4.0 * a))
    price = np.exp(big_a - big_b * np.asarray(r_now, dtype=float))
    return float(price) if np.ndim(price) == 0 else price
