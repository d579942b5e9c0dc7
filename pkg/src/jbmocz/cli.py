"""Command-line front end: ``jbmocz-sim --scheme jutted --ebn0 0:1:20 ...``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from dataclasses import replace

import numpy as np

from .cfo import EstimatorConfig
from .channel import CHANNELS
from .simulator import CODES, CSV_HEADER, ESTIMATORS, SCHEMES, ConfigError, SimConfig, csv_row, run_sweep, sweep_zeta

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3


def parse_grid(text: str) -> list[float]:
    """``START:STEP:STOP`` (stop inclusive) or a comma-separated list."""
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be START:STEP:STOP, got {text!r}")
        start, step, stop = map(float, parts)
        if step <= 0 or stop < start:
            raise ValueError(f"empty or descending range {text!r}")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [float(v) for v in np.round(start + step * np.arange(n), 12)]
    return [float(v) for v in text.split(",") if v.strip()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jbmocz-sim", description="BER/BLER Monte Carlo for (jutted) BMOCZ links.")
    p.add_argument("--scheme", choices=SCHEMES, default="jutted")
    p.add_argument("--bits", "-K", dest="K", type=int, default=32, help="zeros per block")
    p.add_argument("--zeta", type=float, default=1.15, help="asymmetry factor of the jutted pair")
    p.add_argument("--radius", type=float, default=None, help="base radius (default: sqrt(1+sin(pi/K)))")
    p.add_argument("--code", choices=CODES, default="none")
    p.add_argument("--channel", choices=CHANNELS, default="awgn")
    p.add_argument("--cfo", default="none", help="none, uniform or fixed:PHI")
    p.add_argument("--estimator", choices=ESTIMATORS, default="none")
    p.add_argument("--grid-N", dest="grid_N", type=int, default=64)
    p.add_argument("--delta", type=float, default=0.2)
    p.add_argument("--iters", type=int, default=2)
    p.add_argument("--oversample", type=int, default=200, metavar="Q")
    p.add_argument("--ebn0", default="0:1:20", help="START:STEP:STOP or comma list, in dB")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="output path (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--workers", type=int, default=1, help="threads per grid point")
    p.add_argument("--zeta-grid", default=None,
                   help="sweep zeta over this grid at the single --ebn0 value; one CSV row per zeta")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> SimConfig:
    try:
        est = EstimatorConfig(N=args.grid_N, delta=args.delta, n_iterations=args.iters)
        grid = parse_grid(args.ebn0)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return SimConfig(
        scheme=args.scheme, K=args.K, zeta=args.zeta, R=args.radius, code=args.code,
        channel=args.channel, cfo=args.cfo, estimator=args.estimator, estimator_config=est,
        Q=args.oversample, ebn0_grid=tuple(grid), trials=args.trials, seed=args.seed,
    )


def _run_zeta(cfg: SimConfig, args, stream) -> None:
    zetas = parse_grid(args.zeta_grid)
    if len(cfg.ebn0_grid) != 1:
        raise ConfigError("--zeta-grid needs exactly one --ebn0 value")
    sweep = sweep_zeta(cfg, zetas, cfg.ebn0_grid[0], workers=args.workers)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for z, res in sweep.rows:
        c = replace(cfg, zeta=z, scheme="jutted" if z > 1 else "huffman")
        writer.writerow(csv_row(c, res))
    if sweep.rows:
        logging.getLogger(__name__).info("best zeta: %g", sweep.best_zeta)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = config_from_args(args)
        if args.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if args.zeta_grid is not None:
            try:
                zeta_list = parse_grid(args.zeta_grid)
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
            if cfg.scheme != "jutted" or any(z < 1 for z in zeta_list):
                raise ConfigError("--zeta-grid requires --scheme jutted and zeta values >= 1")
            if args.out:
                with open(args.out, "w", newline="", encoding="utf-8") as fh:
                    _run_zeta(cfg, args, fh)
            else:
                _run_zeta(cfg, args, sys.stdout)
        else:
            run_sweep(cfg, args.out if args.out else sys.stdout, fmt=args.format, workers=args.workers)
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
