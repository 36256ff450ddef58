"""Scenario configuration: dataclasses, strict parsing and validation.

A config document is a mapping (YAML or JSON) with ``schema_version: 1``.
Unknown keys are rejected so that typos in sweeps fail loudly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

import yaml

from .balance import RegulatoryConfig, WeightSchedule
from .fva import FundingQuote
from .ratesim import PathSet, TimeGrid, VasicekParams, simulate_paths
from .swap import ExposureProfile, SwapSpec, build_exposure

SCHEMA_VERSION = 1
MODES = ("price", "sweep_ois", "sweep_spread", "nsfr_profile", "optimize")


class ConfigError(ValueError):
    """Invalid scenario configuration; `field` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


@dataclass
class RatesConfig:
    r0: float = 0.01
    mean_reversion: float = 0.5
    long_run_mean: float | None = None  # None: revert to r0
    volatility: float = 0.01
    n_paths: int = 10_000
    seed: int = 20180101
    steps_per_year: int = 12


@dataclass
class SwapConfig:
    notional: float = 100e6
    fixed_rate: float = 0.02
    maturity: float = 5.0
    pay_fixed: bool = True
    payment_frequency: int = 2
    im_fraction: float = 0.01


@dataclass
class BalanceConfig:
    reg_cap: float | None = None  # None: reg_cap_fraction * notional
    reg_cap_fraction: float = 0.005
    liability_floor: float = 10_000.0
    one_year_alpha: float = 1.0
    im_in_rsf: bool = True


@dataclass
class QuoteConfig:
    maturity: float = 1.0
    spread: float = 0.0051
    shortfall_spread: float | None = None
    alpha: float | None = None  # None: from the maturity bucket


@dataclass
class SweepConfig:
    ois_levels: list[float] = field(default_factory=lambda: [0.005, 0.01, 0.015])
    spread_levels: list[float] = field(
        default_factory=lambda: [0.003, 0.004, 0.005, 0.006, 0.007, 0.008])
    alpha_switch_spread: float = 0.005  # spreads above this fund at alpha = 1.0


@dataclass
class HistogramConfig:
    buckets: int = 50
    lower: float = 0.0
    upper: float = 3.0


class Book(NamedTuple):
    grid: TimeGrid
    params: VasicekParams
    paths: PathSet
    exposure: ExposureProfile


@dataclass
class ScenarioConfig:
    schema_version: int = SCHEMA_VERSION
    mode: str = "price"
    rates: RatesConfig = field(default_factory=RatesConfig)
    swap: SwapConfig = field(default_factory=SwapConfig)
    balance: BalanceConfig = field(default_factory=BalanceConfig)
    quotes: list[QuoteConfig] = field(default_factory=lambda: [QuoteConfig()])
    reference_quote: int = 0
    sweep: SweepConfig = field(default_factory=SweepConfig)
    histogram: HistogramConfig = field(default_factory=HistogramConfig)

    # -- model objects -------------------------------------------------

    def grid(self) -> TimeGrid:
        return TimeGrid.uniform(self.swap.maturity, self.rates.steps_per_year,
                                self.swap.payment_frequency)

    def vasicek(self) -> VasicekParams:
        r = self.rates
        b = r.r0 if r.long_run_mean is None else r.long_run_mean
        return VasicekParams(r0=r.r0, a=r.mean_reversion, b=b, sigma=r.volatility)

    def swap_spec(self) -> SwapSpec:
        s = self.swap
        return SwapSpec(s.notional, s.fixed_rate, s.maturity, s.pay_fixed, s.payment_frequency)

    def weights(self) -> WeightSchedule:
        return WeightSchedule(self.balance.one_year_alpha)

    def regulatory(self) -> RegulatoryConfig:
        b = self.balance
        cap = b.reg_cap if b.reg_cap is not None else b.reg_cap_fraction * self.swap.notional
        return RegulatoryConfig(cap, b.liability_floor, b.im_in_rsf, self.weights())

    def resolved_quotes(self) -> list[FundingQuote]:
        w = self.weights()
        return [FundingQuote(q.maturity, q.spread,
                             w.asf_weight(q.maturity) if q.alpha is None else q.alpha,
                             q.shortfall_spread)
                for q in self.quotes]

    def reference(self) -> FundingQuote:
        return self.resolved_quotes()[self.reference_quote]

    def simulate(self, workers: int = 1) -> Book:
        grid, params, spec = self.grid(), self.vasicek(), self.swap_spec()
        paths = simulate_paths(params, grid, self.rates.n_paths, self.rates.seed, workers)
        exposure = build_exposure(spec, params, paths, grid, self.swap.im_fraction)
        return Book(grid, params, paths, exposure)

    def replace(self, **changes) -> "ScenarioConfig":
        """Copy with dotted-path overrides, e.g. ``replace(**{"rates.r0": 0.02})``."""
        data = self.to_dict()
        for key, value in changes.items():
            node = data
            *head, last = key.split(".")
            for part in head:
                node = node[part]
            node[last] = value
        return from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _build(cls, data: Any, path: str):
    if not isinstance(data, dict):
        raise ConfigError(path.rstrip(".") or "<root>", "expected a mapping")
    known = {f.name: f for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ConfigError(f"{path}{unknown[0]}", "unknown key")
    kwargs = {}
    for name, value in data.items():
        sub = _NESTED.get((cls, name))
        where = f"{path}{name}"
        if sub is list:
            if not isinstance(value, list):
                raise ConfigError(where, "expected a list")
            value = [_build(QuoteConfig, v, f"{where}[{i}].") for i, v in enumerate(value)]
        elif sub is not None:
            value = _build(sub, value, f"{where}.")
        kwargs[name] = value
    return cls(**kwargs)


_NESTED = {
    (ScenarioConfig, "rates"): RatesConfig,
    (ScenarioConfig, "swap"): SwapConfig,
    (ScenarioConfig, "balance"): BalanceConfig,
    (ScenarioConfig, "sweep"): SweepConfig,
    (ScenarioConfig, "histogram"): HistogramConfig,
    (ScenarioConfig, "quotes"): list,
}


def _number(where: str, value, *, integer=False, optional=False):
    if value is None and optional:
        return
    ok = isinstance(value, int) if integer else isinstance(value, (int, float))
    if not ok or isinstance(value, bool):
        raise ConfigError(where, f"expected {'an integer' if integer else 'a number'}, "
                                 f"got {value!r}")


def validate(cfg: ScenarioConfig) -> ScenarioConfig:
    if cfg.schema_version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"unsupported version {cfg.schema_version!r}")
    if cfg.mode not in MODES:
        raise ConfigError("mode", f"must be one of {', '.join(MODES)}")

    r = cfg.rates
    for name in ("r0", "mean_reversion", "volatility"):
        _number(f"rates.{name}", getattr(r, name))
    _number("rates.long_run_mean", r.long_run_mean, optional=True)
    for name in ("n_paths", "seed", "steps_per_year"):
        _number(f"rates.{name}", getattr(r, name), integer=True)
    if r.mean_reversion < 0:
        raise ConfigError("rates.mean_reversion", "must be >= 0")
    if r.volatility < 0:
        raise ConfigError("rates.volatility", "must be >= 0")
    if r.n_paths < 1:
        raise ConfigError("rates.n_paths", "must be >= 1")
    if r.seed < 0:
        raise ConfigError("rates.seed", "must be >= 0")

    s = cfg.swap
    for name in ("notional", "fixed_rate", "maturity", "im_fraction"):
        _number(f"swap.{name}", getattr(s, name))
    _number("swap.payment_frequency", s.payment_frequency, integer=True)
    if not isinstance(s.pay_fixed, bool):
        raise ConfigError("swap.pay_fixed", "expected true or false")
    if s.notional <= 0:
        raise ConfigError("swap.notional", "must be > 0")
    if s.maturity <= 0:
        raise ConfigError("swap.maturity", "must be > 0")
    if s.payment_frequency < 1:
        raise ConfigError("swap.payment_frequency", "must be >= 1")
    if s.im_fraction < 0:
        raise ConfigError("swap.im_fraction", "must be >= 0")
    if r.steps_per_year < 1 or r.steps_per_year % s.payment_frequency:
        raise ConfigError("rates.steps_per_year", "must be a positive multiple of "
                                                  "swap.payment_frequency")
    periods = s.maturity * s.payment_frequency
    if abs(periods - round(periods)) > 1e-9:
        raise ConfigError("swap.maturity", "must be a whole number of payment periods")

    b = cfg.balance
    _number("balance.reg_cap", b.reg_cap, optional=True)
    if b.reg_cap is not None and b.reg_cap < 0:
        raise ConfigError("balance.reg_cap", "must be >= 0")
    _number("balance.reg_cap_fraction", b.reg_cap_fraction)
    if b.reg_cap_fraction < 0:
        raise ConfigError("balance.reg_cap_fraction", "must be >= 0")
    _number("balance.liability_floor", b.liability_floor)
    if b.liability_floor <= 0:
        raise ConfigError("balance.liability_floor", "must be > 0")
    if b.one_year_alpha not in (0.5, 1.0):
        raise ConfigError("balance.one_year_alpha", "must be 0.5 or 1.0")
    if not isinstance(b.im_in_rsf, bool):
        raise ConfigError("balance.im_in_rsf", "expected true or false")

    if not cfg.quotes:
        raise ConfigError("quotes", "at least one funding quote is required")
    for i, q in enumerate(cfg.quotes):
        where = f"quotes[{i}]"
        _number(f"{where}.maturity", q.maturity)
        _number(f"{where}.spread", q.spread)
        _number(f"{where}.shortfall_spread", q.shortfall_spread, optional=True)
        _number(f"{where}.alpha", q.alpha, optional=True)
        if q.spread < 0:
            raise ConfigError(f"{where}.spread", "must be >= 0")
        if q.shortfall_spread is not None and q.shortfall_spread < 0:
            raise ConfigError(f"{where}.shortfall_spread", "must be >= 0")
        if q.alpha is not None and q.alpha not in (0.5, 1.0):
            raise ConfigError(f"{where}.alpha", "must be 0.5 or 1.0")
        d = q.maturity * s.payment_frequency
        if q.maturity <= 0 or abs(d - round(d)) > 1e-9:
            raise ConfigError(f"{where}.maturity",
                              "must be a positive multiple of the payment period")
        if q.alpha is None and q.maturity < 0.5:
            raise ConfigError(f"{where}.maturity", "below the 6 month ASF bucket; set alpha")
    _number("reference_quote", cfg.reference_quote, integer=True)
    if not 0 <= cfg.reference_quote < len(cfg.quotes):
        raise ConfigError("reference_quote", "index outside quotes")

    sw = cfg.sweep
    for name in ("ois_levels", "spread_levels"):
        levels = getattr(sw, name)
        if not isinstance(levels, list) or not levels:
            raise ConfigError(f"sweep.{name}", "expected a non-empty list")
        for i, v in enumerate(levels):
            _number(f"sweep.{name}[{i}]", v)
    if any(v < 0 for v in sw.spread_levels):
        raise ConfigError("sweep.spread_levels", "spreads must be >= 0")
    _number("sweep.alpha_switch_spread", sw.alpha_switch_spread)

    h = cfg.histogram
    _number("histogram.buckets", h.buckets, integer=True)
    if h.buckets < 1:
        raise ConfigError("histogram.buckets", "must be >= 1")
    if not h.upper > h.lower:
        raise ConfigError("histogram.upper", "must exceed histogram.lower")
    return cfg


def from_dict(data: dict) -> ScenarioConfig:
    return validate(_build(ScenarioConfig, data, ""))


def load(path: str | Path) -> ScenarioConfig:
    """Read a YAML or JSON scenario file."""
    text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"not valid YAML/JSON: {exc}") from exc
    return from_dict(data or {})
