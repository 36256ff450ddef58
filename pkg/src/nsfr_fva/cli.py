"""Scenario runner: ``nsfr-fva CONFIG [options]``.

Runs one config in one of five modes and writes the results as text, CSV or
JSON. The JSON report embeds the fully resolved config, so any report can be
re-run from its own echo.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import balance
from .config import ConfigError, ScenarioConfig, from_dict, load
from .fva import FundingQuote, price_book
from .optimizer import build_graph, fixed_policy, policy_stderr, solve

log = logging.getLogger("nsfr_fva")

FORMATS = ("text", "csv", "json")


@dataclass
class RunReport:
    config: dict
    mode: str
    n_paths: int
    results: dict
    elapsed: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        return {"config": self.config, "mode": self.mode, "n_paths": self.n_paths,
                "results": self.results, "elapsed_seconds": self.elapsed}


def _floats(arr) -> list:
    return [float(x) for x in arr]


def _price(cfg: ScenarioConfig, workers: int) -> dict:
    book = cfg.simulate(workers)
    quote = cfg.reference()
    res = price_book(book.paths, book.exposure, book.grid, cfg.regulatory(), quote)
    return {"quote": _quote_record(quote), "fva": res.to_record()}


def _quote_record(q: FundingQuote) -> dict:
    return {"label": q.label, "maturity": q.maturity, "spread": q.spread,
            "shortfall_spread": q.shortfall, "alpha": q.alpha}


def _sweep_ois(cfg: ScenarioConfig, workers: int) -> dict:
    rows = []
    for level in cfg.sweep.ois_levels:
        sub = cfg.replace(**{"rates.r0": level})
        book = sub.simulate(workers)
        res = price_book(book.paths, book.exposure, book.grid, sub.regulatory(), sub.reference())
        log.info("r_ois=%.4f fva=%.6g fca=%.6g", level, res.fva_total, res.fca_baseline)
        rows.append({"r_ois": level, **res.to_record()})
    return {"quote": _quote_record(cfg.reference()), "rows": rows}


def _sweep_spread(cfg: ScenarioConfig, workers: int) -> dict:
    book = cfg.simulate(workers)
    reg = cfg.regulatory()
    ref = cfg.reference()
    rows = []
    for spread in cfg.sweep.spread_levels:
        long_term = spread > cfg.sweep.alpha_switch_spread
        quote = FundingQuote(maturity=2.0 if long_term else 0.5, spread=spread,
                             alpha=1.0 if long_term else 0.5,
                             shortfall_spread=ref.shortfall_spread)
        res = price_book(book.paths, book.exposure, book.grid, reg, quote)
        rows.append({"spread": spread, "alpha": quote.alpha, **res.to_record()})
    return {"alpha_switch_spread": cfg.sweep.alpha_switch_spread, "rows": rows}


def _nsfr_profile(cfg: ScenarioConfig, workers: int) -> dict:
    book = cfg.simulate(workers)
    reg = cfg.regulatory()
    alpha = cfg.reference().alpha
    std = balance.nsfr_series(book.exposure, "standard", reg, alpha)
    pinned = balance.nsfr_series(book.exposure, "nsfr_pinned", reg, alpha)
    nsfr_m, nsfr_se = balance.expected_series(std.nsfr)
    d_std, d_std_se = balance.expected_series(std.debt)
    d_pin, d_pin_se = balance.expected_series(pinned.debt)
    h = cfg.histogram
    edges, counts = balance.nsfr_histogram(std.nsfr, h.buckets, h.lower, h.upper)
    series = []
    for k, t in enumerate(book.grid.step_times):
        series.append({
            "time": float(t),
            "expected_nsfr": float(nsfr_m[k]), "se_nsfr": float(nsfr_se[k]),
            "expected_debt_standard": float(d_std[k]), "se_debt_standard": float(d_std_se[k]),
            "expected_debt_pinned": float(d_pin[k]), "se_debt_pinned": float(d_pin_se[k]),
        })
    return {"alpha": alpha, "series": series,
            "histogram": {"edges": _floats(edges), "counts": counts.tolist()}}


def _optimize(cfg: ScenarioConfig, workers: int) -> dict:
    book = cfg.simulate(workers)
    graph = build_graph(cfg, book=book)
    policy = solve(graph)
    fixed = []
    for q, quote in enumerate(graph.quotes):
        p = fixed_policy(graph, q)
        fixed.append({**_quote_record(quote), "cost": p.total_cost,
                      "se_cost": policy_stderr(graph, p)})
    ref = price_book(book.paths, book.exposure, book.grid, cfg.regulatory(), cfg.reference())
    record = policy.to_record(graph)
    return {
        "optimal_fva": policy.total_cost,
        "se_optimal_fva": policy_stderr(graph, policy),
        "policy": record["decisions"],
        "fixed_policies": fixed,
        "reference_quote": _quote_record(cfg.reference()),
        "reference_fva": ref.fva_total,
        "se_reference_fva": ref.se_fva_total,
        "fca_baseline": ref.fca_baseline,
        "se_fca_baseline": ref.se_fca_baseline,
    }


_MODES = {
    "price": _price,
    "sweep_ois": _sweep_ois,
    "sweep_spread": _sweep_spread,
    "nsfr_profile": _nsfr_profile,
    "optimize": _optimize,
}


def run(config: ScenarioConfig, workers: int = 1) -> RunReport:
    start = time.perf_counter()
    results = _MODES[config.mode](config, workers)
    return RunReport(config.to_dict(), config.mode, config.rates.n_paths, results,
                     time.perf_counter() - start)


# -- output ------------------------------------------------------------

_FVA_COLS = ["fva1", "se_fva1", "fva2", "se_fva2", "fva_total", "se_fva_total",
             "fca_baseline", "se_fca_baseline"]


def report_tables(report: RunReport) -> dict[str, tuple[list[str], list[list]]]:
    """Flat tables keyed by name: (header, rows)."""
    res = report.results
    if report.mode == "price":
        return {"price": (_FVA_COLS, [[res["fva"][c] for c in _FVA_COLS]])}
    if report.mode == "sweep_ois":
        cols = ["r_ois"] + _FVA_COLS
        return {"sweep_ois": (cols, [[r[c] for c in cols] for r in res["rows"]])}
    if report.mode == "sweep_spread":
        cols = ["spread", "alpha"] + _FVA_COLS
        return {"sweep_spread": (cols, [[r[c] for c in cols] for r in res["rows"]])}
    if report.mode == "nsfr_profile":
        cols = list(res["series"][0])
        counts = res["histogram"]["counts"]
        times = [row["time"] for row in res["series"]]
        hist = [[times[k], b, n] for k, row in enumerate(counts) for b, n in enumerate(row)]
        return {"nsfr_series": (cols, [[r[c] for c in cols] for r in res["series"]]),
                "nsfr_histogram": (["time", "bucket", "count"], hist)}
    if report.mode == "optimize":
        pcols = ["node", "next_node", "label", "maturity", "arc_cost"]
        fcols = ["label", "maturity", "spread", "alpha", "cost", "se_cost"]
        summary = [["optimal_fva", res["optimal_fva"], res["se_optimal_fva"]],
                   ["reference_fva", res["reference_fva"], res["se_reference_fva"]],
                   ["fca_baseline", res["fca_baseline"], res["se_fca_baseline"]]]
        return {"policy": (pcols, [[r[c] for c in pcols] for r in res["policy"]]),
                "fixed_policies": (fcols, [[r[c] for c in fcols] for r in res["fixed_policies"]]),
                "summary": (["quantity", "value", "se"], summary)}
    raise ValueError(f"unknown mode {report.mode!r}")


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def _text(report: RunReport) -> str:
    out = io.StringIO()
    out.write(f"mode: {report.mode}   paths: {report.n_paths}\n")
    for name, (header, rows) in report_tables(report).items():
        if name == "nsfr_histogram":
            out.write(f"\n[{name}] {len(rows)} (time, bucket, count) rows; see CSV output\n")
            continue
        cells = [header] + [[_fmt(v) for v in row] for row in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        out.write(f"\n[{name}]\n")
        for r in cells:
            out.write("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() + "\n")
    return out.getvalue()


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def render(report: RunReport, fmt: str) -> dict[str, str]:
    """File name -> content for `fmt`."""
    if fmt == "json":
        return {"report.json": json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"}
    if fmt == "csv":
        return {f"{name}.csv": _csv(h, rows) for name, (h, rows) in report_tables(report).items()}
    if fmt == "text":
        return {"report.txt": _text(report)}
    raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")


def emit(report: RunReport, fmt: str, destination: str | Path) -> list[Path]:
    dest = Path(destination)
    try:
        dest.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {dest}: {exc}") from exc
    written = []
    for name, content in render(report, fmt).items():
        path = dest / name
        path.write_text(content)
        written.append(path)
    return written


def parse_report(path: str | Path) -> ScenarioConfig:
    """Config echo of a JSON report, ready to re-run."""
    return from_dict(json.loads(Path(path).read_text())["config"])


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nsfr-fva", description=__doc__.splitlines()[0])
    p.add_argument("config", help="scenario file (YAML/JSON), or a JSON report to re-run")
    p.add_argument("--mode", choices=list(_MODES), help="override the config's mode")
    p.add_argument("--seed", type=int, help="override rates.seed")
    p.add_argument("--paths", type=int, help="override rates.n_paths")
    p.add_argument("--out", "-o", default=None, help="output directory (default: stdout only)")
    p.add_argument("--format", "-f", choices=FORMATS, default="text")
    p.add_argument("--workers", type=int, default=1, help="simulation threads")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        raw = json.loads(Path(args.config).read_text()) if args.config.endswith(".json") else None
        if isinstance(raw, dict) and "results" in raw and "config" in raw:
            cfg = from_dict(raw["config"])
        else:
            cfg = load(args.config)
        overrides = {}
        if args.mode:
            overrides["mode"] = args.mode
        if args.seed is not None:
            overrides["rates.seed"] = args.seed
        if args.paths is not None:
            overrides["rates.n_paths"] = args.paths
        if overrides:
            cfg = cfg.replace(**overrides)
    except ConfigError as exc:
        print(f"nsfr-fva: invalid config: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"nsfr-fva: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    try:
        report = run(cfg, workers=args.workers)
        if args.out:
            for path in emit(report, args.format, args.out):
                log.info("wrote %s", path)
        else:
            for content in render(report, args.format).values():
                sys.stdout.write(content)
    except (OSError, ValueError) as exc:
        print(f"nsfr-fva: {exc}", file=sys.stderr)
        return 1
    if args.out:
        sys.stdout.write(_text(report))
    log.info("finished in %.2fs", report.elapsed)
    return 0


if __name__ == "__main__":
    sys.exit(main())
