"""Run every scenario in configs/ and write JSON and CSV reports.

    python scripts/run_experiments.py [--paths N] [--workers K] [--out results]
"""

import argparse
import logging
from pathlib import Path

from nsfr_fva import cli
from nsfr_fva.config import load

ROOT = Path(__file__).resolve().parents[1]


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--configs", type=Path, default=ROOT / "configs")
    p.add_argument("--out", type=Path, default=ROOT / "results")
    p.add_argument("--paths", type=int, help="override rates.n_paths")
    p.add_argument("--workers", type=int, default=4)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    for path in sorted(args.configs.glob("*.yaml")):
        cfg = load(path)
        if args.paths:
            cfg = cfg.replace(**{"rates.n_paths": args.paths})
        report = cli.run(cfg, workers=args.workers)
        dest = args.out / path.stem
        for fmt in ("json", "csv", "text"):
            cli.emit(report, fmt, dest)
        print(f"== {path.stem} ({report.elapsed:.2f}s) -> {dest}")
        print(cli.render(report, "text")["report.txt"])


if __name__ == "__main__":
    main()
