"""Monte Carlo experiment engine and tabular output.

Experiments are pure functions of their configuration, including the
seed: every trial derives its channel, symbol, noise, and initialization
streams from (seed, trial index, purpose tag), so results do not depend
on execution order or on how many worker processes run the trials.  All
per-trial outputs are integer counts and aggregation is plain integer
summation, which keeps emitted CSV files byte-identical for any worker
count.

Error accounting: blind detectors are scored after aligning their output
to the reference over the code's blind ambiguity group (see
:mod:`blindstbc.stbc`), with the unaligned ("raw") counts reported
alongside so the convention is visible in the output.  The coherent
detector has no ambiguity, so its raw and aligned counts coincide.
"""

from __future__ import annotations

import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from .channel import ChannelRealization, draw_channel, substream, transmit
from .constellation import (
    count_bit_errors,
    count_symbol_errors,
    get_constellation,
    random_symbol_matrix,
)
from .detect import EilsConfig, coherent_ml, eils, exhaustive_ls, ils
from .stbc import best_ambiguity_errors, equivalent_channel

ML_CSI = "ml_csi"
ILS = "ils"
EILS = "eils"
ORACLE = "oracle"
ALL_DETECTORS = (ML_CSI, ILS, EILS, ORACLE)

# Purpose tags for substream derivation; fixed values are part of the
# reproducibility contract for a given seed.
TAG_CHANNEL = 0
TAG_SYMBOLS = 1
TAG_NOISE = 2
TAG_ILS_INIT = 3
TAG_EILS_INIT = 4

_COUNT_KEYS = (
    "symbol_errors",
    "bit_errors",
    "raw_symbol_errors",
    "raw_bit_errors",
    "ils_iterations",
    "eils_executions",
    "eils_ils_iterations",
    "majority_stops",
)


@dataclass(frozen=True)
class SweepConfig:
    """Parameters of one Monte Carlo experiment."""

    modulation: str = "bpsk"
    n_blocks: int = 20
    snr_grid_db: tuple[float, ...] = (0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0)
    trials: int = 10_000
    q: int = 20
    t: int = 2
    seed: int = 0
    detectors: tuple[str, ...] = (ML_CSI, ILS, EILS)
    noise_var: float = 1.0
    max_ils_iterations: int = 50
    residual_match_tol: float = 1e-9
    enumeration_cap: int = 2**20

    def __post_init__(self):
        get_constellation(self.modulation)
        if self.n_blocks < 1:
            raise ValueError("n_blocks must be >= 1")
        if len(self.snr_grid_db) == 0:
            raise ValueError("snr_grid_db must be nonempty")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be > 0")
        for det in self.detectors:
            if det not in ALL_DETECTORS:
                raise ValueError(f"unknown detector {det!r}")
        if not self.detectors:
            raise ValueError("detectors must be nonempty")
        if ORACLE in self.detectors:
            m = len(get_constellation(self.modulation).points)
            if m ** (2 * self.n_blocks) > self.enumeration_cap:
                raise ValueError(
                    "oracle detector requires |alphabet|^(2N) within the "
                    f"enumeration cap ({self.enumeration_cap})"
                )


@dataclass(frozen=True)
class SweepRecord:
    """Aggregated results for one (experiment point, detector) pair.

    ber/ser are ambiguity-aligned for blind detectors; raw_ber/raw_ser
    count errors with no alignment.  The *_ci95 columns are 95% binomial
    confidence half-widths (normal approximation).
    """

    detector: str
    modulation: str
    snr_db: float
    n_blocks: int
    q: int
    t: int
    trials: int
    total_bits: int
    total_symbols: int
    bit_errors: int
    symbol_errors: int
    ber: float
    ser: float
    ber_ci95: float
    ser_ci95: float
    raw_bit_errors: int
    raw_symbol_errors: int
    raw_ber: float
    raw_ser: float
    avg_ils_iterations: float
    avg_eils_executions: float
    majority_stop_fraction: float


@dataclass(frozen=True)
class HistogramConfig:
    """Parameters of the repeated-initialization residual experiment."""

    modulation: str = "bpsk"
    n_blocks: int = 20
    power_db: float = 8.0
    noise_var: float = 1.0
    runs: int = 10_000
    seed: int = 0
    residual_bins: int = 60
    max_ils_iterations: int = 50

    def __post_init__(self):
        get_constellation(self.modulation)
        if self.n_blocks < 1:
            raise ValueError("n_blocks must be >= 1")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.noise_var <= 0:
            raise ValueError("noise_var must be > 0")
        if self.residual_bins < 1:
            raise ValueError("residual_bins must be >= 1")


@dataclass(frozen=True)
class HistogramRecord:
    """One histogram: counts over half-open bins [edge_i, edge_i+1)."""

    kind: str  # "residual" or "error_count"
    bin_edges: tuple[float, ...]
    counts: tuple[int, ...]


def _new_tally() -> dict[str, int]:
    return {k: 0 for k in _COUNT_KEYS}


def run_trial(cfg: SweepConfig, snr_db: float, trial_index: int) -> dict[str, dict[str, int]]:
    """Run all enabled detectors on one shared burst; return integer counts.

    Deterministic given (cfg.seed, trial_index): the channel, symbols,
    noise, and detector initializations each use their own derived
    substream; the SNR point only changes the transmit power, so sweeps
    share realizations across points (common random numbers).
    """
    c = get_constellation(cfg.modulation)
    g = draw_channel(substream(cfg.seed, trial_index, TAG_CHANNEL))
    s_true = random_symbol_matrix(
        c, cfg.n_blocks, substream(cfg.seed, trial_index, TAG_SYMBOLS)
    )
    power = cfg.noise_var * 10.0 ** (snr_db / 10.0)
    ch = ChannelRealization(g=g, power_p=power, noise_var=cfg.noise_var)
    y, yt = transmit(s_true, ch, substream(cfg.seed, trial_index, TAG_NOISE))

    out: dict[str, dict[str, int]] = {}
    for det in cfg.detectors:
        tally = _new_tally()
        if det == ML_CSI:
            h_eff = np.sqrt(power / 2.0) * equivalent_channel(g)
            s_hat = coherent_ml(y, h_eff, c)
            sym = count_symbol_errors(s_hat, s_true, c)
            bits = count_bit_errors(s_hat, s_true, c)
            tally["symbol_errors"] = sym
            tally["bit_errors"] = bits
            tally["raw_symbol_errors"] = sym
            tally["raw_bit_errors"] = bits
        elif det == ILS:
            rng = substream(cfg.seed, trial_index, TAG_ILS_INIT)
            init = random_symbol_matrix(c, cfg.n_blocks, rng)
            run = ils(y, yt, c, init, cfg.max_ils_iterations)
            tally["ils_iterations"] = run.iterations
            _score_blind(tally, run.s_hat, s_true, c)
        elif det == EILS:
            rng = substream(cfg.seed, trial_index, TAG_EILS_INIT)
            ecfg = EilsConfig(
                q=cfg.q,
                t=cfg.t,
                residual_match_tol=cfg.residual_match_tol,
                max_ils_iterations=cfg.max_ils_iterations,
            )
            res = eils(y, yt, c, ecfg, rng)
            tally["eils_executions"] = res.executions
            tally["eils_ils_iterations"] = res.total_ils_iterations
            tally["majority_stops"] = int(res.stopped_by_majority)
            _score_blind(tally, res.best.s_hat, s_true, c)
        elif det == ORACLE:
            s_hat, _ = exhaustive_ls(y, c, cfg.enumeration_cap)
            _score_blind(tally, s_hat, s_true, c)
        out[det] = tally
    return out


def _score_blind(tally: dict[str, int], s_hat, s_true, c) -> None:
    _, sym, bits = best_ambiguity_errors(s_hat, s_true, c)
    tally["symbol_errors"] = sym
    tally["bit_errors"] = bits
    tally["raw_symbol_errors"] = count_symbol_errors(s_hat, s_true, c)
    tally["raw_bit_errors"] = count_bit_errors(s_hat, s_true, c)


def _trial_batch(cfg: SweepConfig, snr_db: float, start: int, stop: int):
    tallies = {det: _new_tally() for det in cfg.detectors}
    for trial in range(start, stop):
        counts = run_trial(cfg, snr_db, trial)
        for det, tally in counts.items():
            acc = tallies[det]
            for key, value in tally.items():
                acc[key] += value
    return tallies


def _merge(into: dict[str, dict[str, int]], part: dict[str, dict[str, int]]) -> None:
    for det, tally in part.items():
        acc = into[det]
        for key, value in tally.items():
            acc[key] += value


def _run_point(cfg: SweepConfig, snr_db: float, workers: int) -> dict[str, dict[str, int]]:
    if workers <= 1:
        return _trial_batch(cfg, snr_db, 0, cfg.trials)
    bounds = np.linspace(0, cfg.trials, 4 * workers + 1).astype(int)
    tallies = {det: _new_tally() for det in cfg.detectors}
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_trial_batch, cfg, snr_db, int(lo), int(hi))
            for lo, hi in zip(bounds[:-1], bounds[1:])
            if hi > lo
        ]
        for fut in futures:
            _merge(tallies, fut.result())
    return tallies


def _binomial_ci95(errors: int, total: int) -> float:
    p = errors / total
    return 1.96 * np.sqrt(p * (1.0 - p) / total)


def _records_for_point(
    cfg: SweepConfig, snr_db: float, tallies: dict[str, dict[str, int]]
) -> list[SweepRecord]:
    c = get_constellation(cfg.modulation)
    total_symbols = cfg.trials * 2 * cfg.n_blocks
    total_bits = total_symbols * c.bits_per_symbol
    records = []
    for det in cfg.detectors:
        tally = tallies[det]
        execs = tally["eils_executions"]
        if det == EILS:
            avg_iter = tally["eils_ils_iterations"] / execs if execs else 0.0
            avg_exec = execs / cfg.trials
            stop_frac = tally["majority_stops"] / cfg.trials
        elif det == ILS:
            avg_iter = tally["ils_iterations"] / cfg.trials
            avg_exec = 0.0
            stop_frac = 0.0
        else:
            avg_iter = 0.0
            avg_exec = 0.0
            stop_frac = 0.0
        records.append(
            SweepRecord(
                detector=det,
                modulation=cfg.modulation,
                snr_db=snr_db,
                n_blocks=cfg.n_blocks,
                q=cfg.q,
                t=cfg.t,
                trials=cfg.trials,
                total_bits=total_bits,
                total_symbols=total_symbols,
                bit_errors=tally["bit_errors"],
                symbol_errors=tally["symbol_errors"],
                ber=tally["bit_errors"] / total_bits,
                ser=tally["symbol_errors"] / total_symbols,
                ber_ci95=_binomial_ci95(tally["bit_errors"], total_bits),
                ser_ci95=_binomial_ci95(tally["symbol_errors"], total_symbols),
                raw_bit_errors=tally["raw_bit_errors"],
                raw_symbol_errors=tally["raw_symbol_errors"],
                raw_ber=tally["raw_bit_errors"] / total_bits,
                raw_ser=tally["raw_symbol_errors"] / total_symbols,
                avg_ils_iterations=avg_iter,
                avg_eils_executions=avg_exec,
                majority_stop_fraction=stop_frac,
            )
        )
    return records


def sweep_snr(cfg: SweepConfig, workers: int = 1) -> list[SweepRecord]:
    """Error rates versus SNR: one record per (SNR point, detector)."""
    records = []
    for snr_db in cfg.snr_grid_db:
        tallies = _run_point(cfg, snr_db, workers)
        records.extend(_records_for_point(cfg, snr_db, tallies))
    return records


def sweep_samples(cfg: SweepConfig, n_grid, workers: int = 1) -> list[SweepRecord]:
    """Error rates versus burst length N at fixed SNR point(s)."""
    records = []
    for snr_db in cfg.snr_grid_db:
        for n_blocks in n_grid:
            point_cfg = replace(cfg, n_blocks=int(n_blocks))
            tallies = _run_point(point_cfg, snr_db, workers)
            records.extend(_records_for_point(point_cfg, snr_db, tallies))
    return records


def sweep_q(cfg: SweepConfig, q_grid, workers: int = 1) -> list[SweepRecord]:
    """Error rates versus the restart budget Q, with T = min(4, Q-1).

    The majority threshold tracks the budget (floored at 1) so small
    budgets remain feasible.
    """
    records = []
    for q in q_grid:
        q = int(q)
        point_cfg = replace(cfg, q=q, t=max(1, min(4, q - 1)))
        for snr_db in cfg.snr_grid_db:
            tallies = _run_point(point_cfg, snr_db, workers)
            records.extend(_records_for_point(point_cfg, snr_db, tallies))
    return records


def histogram_experiment(
    cfg: HistogramConfig,
    return_samples: bool = False,
):
    """Distribution of ILS outcomes across random initializations.

    Fixes a single channel/symbol/noise realization, reruns ILS cfg.runs
    times from fresh uniform initializations, and histograms the final
    residuals and the ambiguity-aligned symbol-error counts.  Each
    histogram's counts sum to cfg.runs.

    Returns (residual histogram, error-count histogram); with
    return_samples=True the per-run (residuals, error counts) arrays are
    appended so callers can study the joint behavior.
    """
    c = get_constellation(cfg.modulation)
    g = draw_channel(substream(cfg.seed, 0, TAG_CHANNEL))
    s_true = random_symbol_matrix(c, cfg.n_blocks, substream(cfg.seed, 0, TAG_SYMBOLS))
    power = cfg.noise_var * 10.0 ** (cfg.power_db / 10.0)
    ch = ChannelRealization(g=g, power_p=power, noise_var=cfg.noise_var)
    y, yt = transmit(s_true, ch, substream(cfg.seed, 0, TAG_NOISE))

    residuals = np.empty(cfg.runs)
    error_counts = np.empty(cfg.runs, dtype=np.int64)
    for run_index in range(cfg.runs):
        rng = substream(cfg.seed, run_index, TAG_ILS_INIT)
        init = random_symbol_matrix(c, cfg.n_blocks, rng)
        run = ils(y, yt, c, init, cfg.max_ils_iterations)
        residuals[run_index] = run.residual
        _, sym, _ = best_ambiguity_errors(run.s_hat, s_true, c)
        error_counts[run_index] = sym

    res_counts, res_edges = np.histogram(residuals, bins=cfg.residual_bins)
    err_edges = np.arange(error_counts.max() + 2) - 0.5
    err_counts, _ = np.histogram(error_counts, bins=err_edges)
    records = (
        HistogramRecord(
            kind="residual",
            bin_edges=tuple(float(e) for e in res_edges),
            counts=tuple(int(v) for v in res_counts),
        ),
        HistogramRecord(
            kind="error_count",
            bin_edges=tuple(float(e) for e in err_edges),
            counts=tuple(int(v) for v in err_counts),
        ),
    )
    if return_samples:
        return records + (residuals, error_counts)
    return records


# ---------------------------------------------------------------------------
# Tabular output
# ---------------------------------------------------------------------------

_CSV_FIELDS = tuple(SweepRecord.__dataclass_fields__)


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def config_hash(cfg) -> str:
    """Stable short hash of a configuration dataclass."""
    payload = json.dumps(asdict(cfg), sort_keys=True, default=str)
    return hashlib.sha256(payload.encode()).hexdigest()[:12]


def sweep_csv_text(records, cfg) -> str:
    """Render sweep records as CSV with seed and config-hash columns."""
    digest = config_hash(cfg)
    lines = [",".join(_CSV_FIELDS + ("seed", "config_hash"))]
    for rec in records:
        row = [_fmt(getattr(rec, name)) for name in _CSV_FIELDS]
        row.append(str(cfg.seed))
        row.append(digest)
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def write_sweep_csv(path, records, cfg) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(sweep_csv_text(records, cfg))


def histogram_csv_text(records, cfg) -> str:
    """Render histogram records as CSV rows of (kind, bin bounds, count)."""
    digest = config_hash(cfg)
    lines = [",".join(("kind", "bin_left", "bin_right", "count", "seed", "config_hash"))]
    for rec in records:
        for left, right, count in zip(rec.bin_edges[:-1], rec.bin_edges[1:], rec.counts):
            lines.append(
                ",".join(
                    (rec.kind, _fmt(float(left)), _fmt(float(right)), str(count),
                     str(cfg.seed), digest)
                )
            )
    return "\n".join(lines) + "\n"


def write_histogram_csv(path, records, cfg) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(histogram_csv_text(records, cfg))


def write_manifest(path, cfg, extra: dict | None = None) -> None:
    """JSON run manifest: full config, hash, and a wall-clock timestamp."""
    payload = {
        "config": asdict(cfg),
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
