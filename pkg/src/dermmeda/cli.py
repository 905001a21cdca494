"""Command-line entry point.

Exit codes: 0 success, 1 at least one run failed, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import harness
from .benchmarks import read_pf, sample_true_pf, write_pf
from .metrics import igd


def _read_approx(path: str) -> np.ndarray:
    """Objective vectors from CSV (commas or whitespace, optional header row)."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    rows = []
    for i, ln in enumerate(lines):
        parts = ln.replace(",", " ").split()
        try:
            rows.append([float(p) for p in parts])
        except ValueError:
            if i == 0:
                continue
            raise
    if not rows:
        raise ValueError(f"{path}: no objective vectors")
    return np.array(rows, dtype=float)


def _cmd_run(args) -> int:
    spec = harness.load_config(args.config, args.out)
    rows = harness.run_experiment(spec, workers=args.workers)
    for r in rows:
        print(f"{r.problem:>3} {r.algorithm:<11} mean_igd={r.mean_igd:.4f} std={r.std_igd:.4f} {r.note}")
    print(f"wrote {spec.output_dir / 'summary.csv'}")
    return 1 if any(r.failed_runs for r in rows) else 0


def _cmd_sweep(args) -> int:
    spec = harness.load_config(args.config, args.out)
    rows = harness.sweep(spec, args.param, harness._parse_list(args.values), workers=args.workers)
    for r in rows:
        print(f"{r['parameter']}={r['value']:<8} {r['problem']:>3} {r['algorithm']:<11} mean_igd={r['mean_igd']:.4f}")
    print(f"wrote {spec.output_dir / f'sweep_{args.param}.csv'}")
    return 1 if any(r["failed_runs"] for r in rows) else 0


def _cmd_igd(args) -> int:
    approx = _read_approx(args.approx)
    ref = read_pf(args.reference) if args.reference else sample_true_pf(args.problem)
    print(harness.fmt(igd(approx, ref)))
    return 0


def _cmd_pf(args) -> int:
    write_pf(args.out, sample_true_pf(args.problem, args.count))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dermmeda", description="DE/RM-MEDA experiment runner")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run an experiment battery")
    p.add_argument("--config", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help=f"output directory (overrides ${harness.OUTPUT_ENV} and config)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="sweep one parameter over a battery")
    p.add_argument("--config", required=True)
    p.add_argument("--param", required=True, choices=["K", "alpha_beta", "dim"])
    p.add_argument("--values", required=True, help="comma list, alpha_beta pairs as 0.3:0.6")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("igd", help="IGD of an approximation set")
    p.add_argument("--approx", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--reference", help="PF file, one whitespace-separated point per line")
    group.add_argument("--problem", help="use the built-in reference front of F1..F9")
    p.set_defaults(func=_cmd_igd)

    p = sub.add_parser("pf", help="export a reference front")
    p.add_argument("--problem", required=True)
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pf)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except harness.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
