"""
Debt-maturity choice as a shortest path over payment dates.

Nodes are payment dates 0..N. Taking quote q at node i funds the book with
q's debt until node min(i + duration(q), N). The short rate is exogenous to
the funding decision, so each arc's expected cost can be estimated once on a
shared path set and the problem is a deterministic shortest path on a DAG:

    V_N = 0,    V_i = min_q { C(i, q) + V_{j(i, q)} }
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from .balance import book_rsf, required_debt
from .fva import FundingQuote, path_mean
from .ratesim import discount_factors

if TYPE_CHECKING:
    from .config import Book, ScenarioConfig

ENUMERATION_LIMIT = 10 ** 6


@dataclass(frozen=True)
class PolicyGraph:
    """Arc costs `arc_cost[i, q]` for leaving node i with quote q."""

    n_periods: int
    durations: tuple[int, ...]
    arc_cost: np.ndarray
    quotes: tuple[FundingQuote, ...] | None = None
    arc_stderr: np.ndarray | None = None
    # per-path arc costs (n_paths, n_periods, n_quotes), for policy errors
    arc_samples: np.ndarray | None = None

    def __post_init__(self):
        cost = np.asarray(self.arc_cost, dtype=float)
        durations = tuple(int(d) for d in self.durations)
        if self.n_periods < 1:
            raise ValueError("graph needs at least one period")
        if not durations:
            raise ValueError("graph needs at least one quote")
        if any(d < 1 for d in durations):
            raise ValueError("quote durations must be >= 1 period (no self-loops)")
        if cost.shape != (self.n_periods, len(durations)):
            raise ValueError(f"arc_cost must be shaped ({self.n_periods}, {len(durations)})")
        if not np.all(np.isfinite(cost)):
            raise ValueError("arc costs must be finite")
        if self.quotes is not None and len(self.quotes) != len(durations):
            raise ValueError("one quote per duration")
        cost.setflags(write=False)
        object.__setattr__(self, "arc_cost", cost)
        object.__setattr__(self, "durations", durations)

    @property
    def terminal(self) -> int:
        return self.n_periods

    @property
    def n_quotes(self) -> int:
        return len(self.durations)

    def target(self, node: int, q: int) -> int:
        return min(node + self.durations[q], self.n_periods)

    def preference(self) -> list[int]:
        """Quote indices in tie-break order: longest maturity first, then
        list order."""
        return sorted(range(self.n_quotes), key=lambda q: (-self.durations[q], q))


@dataclass(frozen=True)
class FundingPolicy:
    decisions: tuple[tuple[int, int], ...]
    total_cost: float
    node_values: tuple[float, ...] | None = None

    @property
    def quote_indices(self) -> list[int]:
        return [q for _, q in self.decisions]

    def to_record(self, graph: PolicyGraph | None = None) -> dict:
        rows = []
        for node, q in self.decisions:
            row = {"node": node, "quote": q}
            if graph is not None:
                row["next_node"] = graph.target(node, q)
                row["arc_cost"] = float(graph.arc_cost[node, q])
                if graph.quotes is not None:
                    row["maturity"] = graph.quotes[q].maturity
                    row["label"] = graph.quotes[q].label
            rows.append(row)
        return {"total_cost": self.total_cost, "decisions": rows}


def solve(graph: PolicyGraph) -> FundingPolicy:
    """Backward induction from the terminal node."""
    n = graph.n_periods
    order = graph.preference()
    values = [0.0] * (n + 1)
    choice = [-1] * n
    for i in range(n - 1, -1, -1):
        best = None
        for q in order:
            c = graph.arc_cost[i, q] + values[graph.target(i, q)]
            if best is None or c < best:
                best, choice[i] = c, q
        values[i] = float(best)
    decisions = []
    node = 0
    while node < n:
        q = choice[node]
        if q < 0:
            raise ValueError(f"terminal node unreachable from node {node}")
        decisions.append((node, q))
        node = graph.target(node, q)
    return FundingPolicy(tuple(decisions), values[0], tuple(values))


def count_policies(graph: PolicyGraph) -> int:
    counts = [0] * (graph.n_periods + 1)
    counts[-1] = 1
    for i in range(graph.n_periods - 1, -1, -1):
        counts[i] = sum(counts[graph.target(i, q)] for q in range(graph.n_quotes))
    return counts[0]


def brute_force(graph: PolicyGraph, limit: int = ENUMERATION_LIMIT) -> FundingPolicy:
    """Exhaustive search over all maturity sequences from node 0 to N.

    Ties go to the sequence whose first differing decision is preferred by
    the same rule `solve` uses.
    """
    n_seq = count_policies(graph)
    if n_seq > limit:
        raise ValueError(f"{n_seq} policies exceed the enumeration limit {limit}")
    rank = {q: r for r, q in enumerate(graph.preference())}
    best_key = None
    best = None

    def walk(node, prefix):
        nonlocal best_key, best
        if node == graph.terminal:
            total = 0.0
            for i, q in reversed(prefix):
                total = graph.arc_cost[i, q] + total
            key = (float(total), tuple(rank[q] for _, q in prefix))
            if best_key is None or key < best_key:
                best_key, best = key, tuple(prefix)
            return
        for q in range(graph.n_quotes):
            prefix.append((node, q))
            walk(graph.target(node, q), prefix)
            prefix.pop()

    walk(0, [])
    return FundingPolicy(best, best_key[0])


def fixed_policy(graph: PolicyGraph, q: int) -> FundingPolicy:
    """Always roll into quote q."""
    decisions = []
    node = 0
    while node < graph.terminal:
        decisions.append((node, q))
        node = graph.target(node, q)
    return FundingPolicy(tuple(decisions), policy_cost(graph, decisions))


def policy_cost(graph: PolicyGraph, decisions: Sequence[tuple[int, int]]) -> float:
    total = 0.0
    for i, q in reversed(list(decisions)):
        total = graph.arc_cost[i, q] + total
    return float(total)


def quote_periods(quote: FundingQuote, payments_per_year: int) -> int:
    d = quote.maturity * payments_per_year
    if abs(d - round(d)) > 1e-9 or round(d) < 1:
        raise ValueError(f"quote maturity {quote.maturity}y is not a whole number of "
                         "payment periods")
    return int(round(d))


def build_graph(config: "ScenarioConfig", quotes: Sequence[FundingQuote] | None = None,
                book: "Book | None" = None, workers: int = 1) -> PolicyGraph:
    """Estimate every arc cost on one common set of simulated paths.

    The integrand on an arc is the full FVA integrand under that arc's quote:
    pinned debt at the quote's ASF weight charged at its spread, plus any
    collateral shortfall, discounted from 0 at r + spread.
    """
    quotes = tuple(config.resolved_quotes() if quotes is None else quotes)
    if not quotes:
        raise ValueError("quotes must not be empty")
    if book is None:
        book = config.simulate(workers=workers)
    grid, paths, exposure = book.grid, book.paths, book.exposure
    reg = config.regulatory()
    freq = config.swap.payment_frequency
    durations = tuple(quote_periods(q, freq) for q in quotes)
    pay = np.asarray(grid.payment_indices)
    n = pay.size - 1
    rsf = book_rsf(exposure, reg)
    cost = np.zeros((n, len(quotes)))
    stderr = np.zeros_like(cost)
    samples = np.zeros((len(paths), n, len(quotes)))
    for qi, q in enumerate(quotes):
        disc = discount_factors(paths, grid, q.spread)
        debt = required_debt(rsf, reg.reg_cap, q.alpha)
        shortfall = np.maximum(exposure.collateral - debt, 0.0)
        flow = disc[:, :-1] * (q.spread * debt + q.shortfall * shortfall)[:, :-1] * grid.dt
        for i in range(n):
            j = min(i + durations[qi], n)
            samples[:, i, qi] = flow[:, pay[i]:pay[j]].sum(axis=1)
            cost[i, qi], stderr[i, qi] = path_mean(samples[:, i, qi])
    return PolicyGraph(n, durations, cost, quotes, stderr, samples)


def policy_stderr(graph: PolicyGraph, policy: FundingPolicy) -> float:
    """Monte Carlo standard error of a policy's total cost."""
    if graph.arc_samples is None:
        raise ValueError("graph carries no per-path arc costs")
    total = sum(graph.arc_samples[:, i, q] for i, q in policy.decisions)
    return path_mean(total).stderr
