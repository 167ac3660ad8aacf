"""Command-line entry point.

Exit codes: 0 success, 1 invalid configuration or I/O failure,
2 numerical abort (eigensolver failure or invariant drift), 3 sweep with
failed points.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .dynamics import NumericalAbort
from .linalg import EigensolverError
from .runner import (
    ConfigError,
    RunConfig,
    load_config,
    run_convergence,
    run_single,
    run_sweep,
    run_wavepacket,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aclsim",
        description=(
            "Simulate a truncated oscillator coupled to a random-matrix bath and "
            "quantify information backflow. Defaults: 16-level system, 64-dim bath, "
            "coherent displacement 1, coupling 0.32, temperature 1, seed 42, "
            "grid dt=0.05 up to t_max=30 (times in inverse system-frequency units)."
        ),
    )
    parser.add_argument("--mode", choices=["single", "sweep", "convergence", "wavepacket"],
                        default="single", help="what to run (default: single)")
    parser.add_argument("--config", default=None,
                        help="JSON config file; CLI flags override file values")
    parser.add_argument("--out", default=None,
                        help="output directory (default: config out_dir or runs/<mode>)")
    parser.add_argument("--seed", type=int, default=None, help="override the RNG seed")
    parser.add_argument("--workers", type=int, default=None,
                        help="concurrent sweep workers (default: config value or 1)")
    parser.add_argument("--method", choices=["branch", "density"], default=None,
                        help="propagation route (default: branch)")
    parser.add_argument("--no-correlations", action="store_true",
                        help="skip correlation/bound columns (fast distinguishability-only run)")
    parser.add_argument("--no-ledger", action="store_true",
                        help="skip global-distinguishability/I_ext columns")
    return parser


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    cfg = load_config(args.config, overrides={"seed": args.seed, "out_dir": args.out})
    if cfg.out_dir is None:
        cfg = replace(cfg, out_dir=f"runs/{args.mode}")
    if args.workers is not None:
        cfg = replace(cfg, workers=args.workers)
    if args.method is not None:
        cfg = replace(cfg, method=args.method)
    if args.no_correlations:
        cfg = replace(cfg, with_correlations=False)
    if args.no_ledger:
        cfg = replace(cfg, with_ledger=False)
    return cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
    except ConfigError as exc:
        print(f"aclsim: invalid configuration: {exc}", file=sys.stderr)
        return 1

    try:
        if args.mode == "single":
            _, out = run_single(cfg)
            print(f"wrote {out / 'series.csv'}")
            return 0
        if args.mode == "sweep":
            n_ok, n_failed, out = run_sweep(cfg)
            print(f"sweep: {n_ok} ok, {n_failed} failed -> {out / 'summary.csv'}")
            return 3 if n_failed else 0
        if args.mode == "convergence":
            report, out = run_convergence(cfg)
            for kind, entry in report["nm"].items():
                print(f"backflow measure ({kind}): relative deviation "
                      f"{entry['relative_deviation']:.3e}")
            print(f"wrote {out / 'convergence.json'}")
            return 0
        out = run_wavepacket(cfg)
        print(f"wrote {out / 'wavepacket_free.csv'} and {out / 'wavepacket_damped.csv'}")
        return 0
    except ConfigError as exc:
        print(f"aclsim: invalid configuration: {exc}", file=sys.stderr)
        return 1
    except (NumericalAbort, EigensolverError) as exc:
        print(f"aclsim: numerical abort: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"aclsim: I/O failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
