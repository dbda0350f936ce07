"""Command-line front end.

Thin shell over :mod:`blindstbc.harness`: every run the CLI performs is
reachable through library calls with identical results.  Each experiment
subcommand writes a CSV results file plus a JSON manifest next to it
(``<out>.manifest.json``); ``decode-once`` reads a received matrix from a
text file and prints the blind detection result.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import harness, matfile
from .channel import substream
from .constellation import get_constellation
from .detect import EilsConfig, eils
from .harness import HistogramConfig, SweepConfig
from .stbc import code_form


def _parse_snr_grid(text: str) -> tuple[float, ...]:
    """Parse 'start:step:stop' (inclusive stop) or a single dB value."""
    parts = text.split(":")
    if len(parts) == 1:
        return (float(parts[0]),)
    if len(parts) != 3:
        raise ValueError(f"bad SNR grid {text!r}; expected start:step:stop")
    start, step, stop = (float(p) for p in parts)
    if step <= 0:
        raise ValueError("SNR grid step must be > 0")
    if stop < start:
        raise ValueError("SNR grid stop must be >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + k * step for k in range(count))


def _parse_int_list(text: str) -> tuple[int, ...]:
    values = tuple(int(p) for p in text.split(",") if p.strip())
    if not values:
        raise ValueError("expected a comma-separated list of integers")
    return values


def _parse_detectors(text: str) -> tuple[str, ...]:
    values = tuple(p.strip() for p in text.split(",") if p.strip())
    if not values:
        raise ValueError("expected a comma-separated list of detectors")
    return values


def _add_common_sweep_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--mod", default="bpsk", help="modulation: bpsk, qpsk, 16qam")
    p.add_argument("--trials", type=int, default=10_000, help="trials per point")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    p.add_argument("--out", required=True, help="output CSV path")
    p.add_argument(
        "--detectors",
        default="ml_csi,ils,eils",
        help="comma list from: ml_csi, ils, eils, oracle",
    )
    p.add_argument("--workers", type=int, default=1, help="worker processes")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blindstbc",
        description="Blind Alamouti detection experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep-snr", help="error rates vs SNR")
    _add_common_sweep_flags(p)
    p.add_argument("--n", type=int, default=20, help="code blocks per burst")
    p.add_argument("--snr", default="0:2:12", help="SNR grid, start:step:stop dB")
    p.add_argument("--q", type=int, default=20, help="max ILS executions")
    p.add_argument("--t", type=int, default=2, help="majority threshold")

    p = sub.add_parser("sweep-n", help="error rates vs burst length")
    _add_common_sweep_flags(p)
    p.add_argument("--n-grid", default="10,20,30,40", help="comma list of N values")
    p.add_argument("--snr", default="12", help="fixed SNR point(s), dB")
    p.add_argument("--q", type=int, default=20, help="max ILS executions")
    p.add_argument("--t", type=int, default=4, help="majority threshold")

    p = sub.add_parser("sweep-q", help="error rates vs restart budget")
    _add_common_sweep_flags(p)
    p.add_argument("--n", type=int, default=20, help="code blocks per burst")
    p.add_argument("--q-grid", default="1,2,5,10,20,50", help="comma list of Q values")
    p.add_argument("--snr", default="10", help="fixed SNR point(s), dB")

    p = sub.add_parser("histogram", help="residual/error histograms over ILS restarts")
    p.add_argument("--mod", default="bpsk", help="modulation: bpsk, qpsk, 16qam")
    p.add_argument("--n", type=int, default=20, help="code blocks per burst")
    p.add_argument("--p-db", type=float, default=8.0, help="transmit power in dB")
    p.add_argument("--noise-var", type=float, default=1.0, help="noise power")
    p.add_argument("--runs", type=int, default=10_000, help="ILS restarts")
    p.add_argument("--bins", type=int, default=60, help="residual histogram bins")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("decode-once", help="blind-decode a received matrix file")
    p.add_argument("input", help="text file holding the 4 x N received matrix")
    p.add_argument("--mod", default="bpsk", help="modulation: bpsk, qpsk, 16qam")
    p.add_argument("--q", type=int, default=20, help="max ILS executions")
    p.add_argument("--t", type=int, default=2, help="majority threshold")
    p.add_argument("--seed", type=int, default=0, help="base RNG seed")

    return parser


def _run_sweep(args, kind: str) -> int:
    detectors = _parse_detectors(args.detectors)
    snr_grid = _parse_snr_grid(args.snr)
    if args.workers < 1:
        raise ValueError("workers must be >= 1")
    if kind == "sweep-q":
        q_grid = _parse_int_list(args.q_grid)
        cfg = SweepConfig(
            modulation=args.mod,
            n_blocks=args.n,
            snr_grid_db=snr_grid,
            trials=args.trials,
            q=max(q_grid),
            t=max(1, min(4, max(q_grid) - 1)),
            seed=args.seed,
            detectors=detectors,
        )
        records = harness.sweep_q(cfg, q_grid, workers=args.workers)
    elif kind == "sweep-n":
        n_grid = _parse_int_list(args.n_grid)
        cfg = SweepConfig(
            modulation=args.mod,
            n_blocks=max(n_grid),
            snr_grid_db=snr_grid,
            trials=args.trials,
            q=args.q,
            t=args.t,
            seed=args.seed,
            detectors=detectors,
        )
        records = harness.sweep_samples(cfg, n_grid, workers=args.workers)
    else:
        cfg = SweepConfig(
            modulation=args.mod,
            n_blocks=args.n,
            snr_grid_db=snr_grid,
            trials=args.trials,
            q=args.q,
            t=args.t,
            seed=args.seed,
            detectors=detectors,
        )
        records = harness.sweep_snr(cfg, workers=args.workers)
    harness.write_sweep_csv(args.out, records, cfg)
    harness.write_manifest(
        f"{args.out}.manifest.json", cfg, extra={"command": kind, "output": args.out}
    )
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _run_histogram(args) -> int:
    cfg = HistogramConfig(
        modulation=args.mod,
        n_blocks=args.n,
        power_db=args.p_db,
        noise_var=args.noise_var,
        runs=args.runs,
        seed=args.seed,
        residual_bins=args.bins,
    )
    records = harness.histogram_experiment(cfg)
    harness.write_histogram_csv(args.out, records, cfg)
    harness.write_manifest(
        f"{args.out}.manifest.json",
        cfg,
        extra={"command": "histogram", "output": args.out},
    )
    print(f"wrote histograms to {args.out}")
    return 0


def _run_decode_once(args) -> int:
    c = get_constellation(args.mod)
    y = matfile.read_matrix(args.input)
    if y.shape[0] != 4:
        raise ValueError(f"expected a 4 x N matrix, file has {y.shape[0]} rows")
    yt = code_form(y)
    cfg = EilsConfig(q=args.q, t=args.t)
    rng = substream(args.seed, 0, harness.TAG_EILS_INIT)
    result = eils(y, yt, c, cfg, rng)
    print(f"residual: {result.best.residual:.17g}")
    print(f"executions: {result.executions}")
    print(f"iterations: {result.best.iterations}")
    print(f"majority_stop: {'yes' if result.stopped_by_majority else 'no'}")
    print("s_hat:")
    sys.stdout.write(matfile.dumps(result.best.s_hat))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("sweep-snr", "sweep-n", "sweep-q"):
            return _run_sweep(args, args.command)
        if args.command == "histogram":
            return _run_histogram(args)
        if args.command == "decode-once":
            return _run_decode_once(args)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
