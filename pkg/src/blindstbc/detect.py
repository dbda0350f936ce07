"""Symbol detectors: coherent ML, iterative least squares, and oracles.

Four detectors share the same received-signal representations (see
:mod:`blindstbc.stbc`):

* :func:`coherent_ml` needs the effective channel (including the transmit
  scale) and is exact maximum likelihood for this code because the
  equivalent channel has orthogonal columns, reducing joint detection to
  per-symbol slicing of the matched-filter output.
* :func:`ils` alternates exact least-squares channel estimation (symbols
  fixed) with sliced least-squares symbol detection (channel fixed) until
  the symbol matrix stops changing.  Both half-steps minimize the same
  Frobenius objective over their own block, so the residual never
  increases from one iteration to the next.
* :func:`eils` restarts :func:`ils` from fresh uniform random symbol
  initializations, keeps the minimum-residual solution, and stops early
  once the current minimum residual has recurred enough times across runs
  (minimum-plus-majority rule).
* :func:`exhaustive_ls` enumerates every symbol matrix and returns the
  global minimizer of the structured least-squares criterion; it is the
  correctness oracle for the iterative detectors.

Blind detectors never see the transmit power: they estimate an effective
channel that absorbs it, and their symbol output is only defined up to
the code's blind ambiguity group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, random_symbol_matrix, slice_matrix
from .linalg import (
    SingularError,
    frobenius_sq,
    hermitian_inverse_2x2,
    solve_normal_eq,
)
from .stbc import code_form, equivalent_channel, stack_codes


class EnumerationTooLarge(ValueError):
    """Exhaustive search would exceed the configured enumeration cap."""


@dataclass(frozen=True)
class DetectionResult:
    """Output of one ILS run (or any single structured detection).

    residual is ||y - h_hat @ s_hat||_F^2 for the returned pair, g_hat is
    the effective channel estimate (transmit scale absorbed), and
    iterations counts completed channel/symbol alternations.
    """

    s_hat: np.ndarray
    g_hat: np.ndarray
    residual: float
    iterations: int
    converged: bool

    @property
    def h_hat(self) -> np.ndarray:
        return equivalent_channel(self.g_hat)


@dataclass(frozen=True)
class EilsConfig:
    """Restart budget and stopping policy for :func:`eils`.

    q: maximum number of counted ILS executions.
    t: majority threshold, the number of earlier residuals the current
       minimum must match (within residual_match_tol, relative) to stop
       early.
    """

    q: int
    t: int
    residual_match_tol: float = 1e-9
    max_ils_iterations: int = 50

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("q must be >= 1")
        if self.t < 1:
            raise ValueError("t must be >= 1")
        if self.residual_match_tol < 0:
            raise ValueError("residual_match_tol must be >= 0")
        if self.max_ils_iterations < 1:
            raise ValueError("max_ils_iterations must be >= 1")


@dataclass(frozen=True)
class EilsResult:
    """Outcome of a multi-start ILS detection."""

    best: DetectionResult
    executions: int
    stopped_by_majority: bool
    residual_history: tuple[float, ...]
    total_ils_iterations: int


def residual(y: np.ndarray, h_hat: np.ndarray, s_hat: np.ndarray) -> float:
    """Least-squares residual ||y - h_hat @ s_hat||_F^2."""
    return frobenius_sq(np.asarray(y) - np.asarray(h_hat) @ np.asarray(s_hat))


def coherent_ml(y: np.ndarray, h_eff: np.ndarray, c: Constellation) -> np.ndarray:
    """Maximum-likelihood detection with a known effective channel.

    Slices the complex least-squares estimate; column orthogonality of the
    equivalent channel makes this per-symbol matched filtering and hence
    exact ML for this code.
    """
    return slice_matrix(solve_normal_eq(h_eff, y), c)


def estimate_channel(yt: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Least-squares effective channel estimate from known symbols.

    Solves min over g of ||yt - stack_codes(s) @ g||_F^2; with noiseless
    data and the true symbols this recovers sqrt(P/2) times the channel.
    """
    return solve_normal_eq(stack_codes(s), yt)


def detect_symbols(y: np.ndarray, g_hat: np.ndarray, c: Constellation) -> np.ndarray:
    """Sliced least-squares symbol detection for a given channel estimate."""
    return slice_matrix(solve_normal_eq(equivalent_channel(g_hat), y), c)


def ils(
    y: np.ndarray,
    yt: np.ndarray,
    c: Constellation,
    init: np.ndarray,
    max_iter: int = 50,
) -> DetectionResult:
    """Alternating least-squares detection from one initialization.

    Stops at the first exact symbol-matrix fixed point, or after max_iter
    alternations (converged=False; in practice the fixed point arrives
    within a handful of iterations and the cap only breaks rare two-cycles).
    Raises SingularError for degenerate inputs such as an all-zero burst.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    s_prev = np.asarray(init, dtype=np.complex128)
    g_hat = None
    for d in range(1, max_iter + 1):
        g_hat = estimate_channel(yt, s_prev)
        s_cur = detect_symbols(y, g_hat, c)
        if np.array_equal(s_cur, s_prev):
            return DetectionResult(
                s_hat=s_cur,
                g_hat=g_hat,
                residual=residual(y, equivalent_channel(g_hat), s_cur),
                iterations=d,
                converged=True,
            )
        s_prev = s_cur
    return DetectionResult(
        s_hat=s_prev,
        g_hat=g_hat,
        residual=residual(y, equivalent_channel(g_hat), s_prev),
        iterations=max_iter,
        converged=False,
    )


# Failed runs (singular systems, iteration-cap hits) are redrawn rather than
# counted; this bounds the redraws so degenerate inputs cannot hang.
_MAX_FAILED_RUNS = 1000


def eils(
    y: np.ndarray,
    yt: np.ndarray,
    c: Constellation,
    cfg: EilsConfig,
    rng: np.random.Generator,
) -> EilsResult:
    """Multi-start ILS with minimum-residual selection and early stopping.

    Counts up to cfg.q successful ILS executions, each from a fresh
    uniform random initialization drawn from rng.  After an execution
    whose residual is a running minimum, stops early if that residual
    matches at least cfg.t earlier ones within the relative tolerance;
    otherwise exhausts the budget and returns the minimum-residual pair.
    On exact residual ties the earlier solution is kept.
    """
    n_blocks = np.asarray(y).shape[1]
    history: list[float] = []
    best: DetectionResult | None = None
    r_min = np.inf
    stopped_by_majority = False
    total_iterations = 0
    failures = 0
    while len(history) < cfg.q:
        init = random_symbol_matrix(c, n_blocks, rng)
        try:
            run = ils(y, yt, c, init, cfg.max_ils_iterations)
        except SingularError:
            run = None
        if run is None or not run.converged:
            failures += 1
            if failures > _MAX_FAILED_RUNS:
                raise RuntimeError(
                    "ILS failed to produce a converged run after "
                    f"{_MAX_FAILED_RUNS} attempts"
                )
            continue
        r_q = run.residual
        history.append(r_q)
        total_iterations += run.iterations
        if r_q <= r_min:
            if r_q < r_min:
                best = run
            r_min = r_q
            tol = cfg.residual_match_tol * max(r_q, 1.0)
            matches = sum(1 for r_i in history[:-1] if abs(r_q - r_i) <= tol)
            if matches >= cfg.t:
                stopped_by_majority = True
                break
    return EilsResult(
        best=best,
        executions=len(history),
        stopped_by_majority=stopped_by_majority,
        residual_history=tuple(history),
        total_ils_iterations=total_iterations,
    )


def exhaustive_ls(
    y: np.ndarray,
    c: Constellation,
    enumeration_cap: int = 2**20,
) -> tuple[np.ndarray, float]:
    """Global minimizer of the structured blind least-squares criterion.

    Enumerates every 2 x N symbol matrix over the alphabet, pairs each
    with its least-squares channel, and returns the symbol matrix with the
    smallest residual together with that residual.  The residual is
    computed through the same path the iterative detectors use, so their
    outputs are directly comparable.  First-found minimum wins ties;
    degenerate candidates that yield singular systems are skipped.
    """
    y = np.asarray(y, dtype=np.complex128)
    n_blocks = y.shape[1]
    m = len(c.points)
    total = m ** (2 * n_blocks)
    if total > enumeration_cap:
        raise EnumerationTooLarge(
            f"{m}^{2 * n_blocks} = {total} candidates exceed cap {enumeration_cap}"
        )
    yt = code_form(y)
    best_s = None
    best_r = np.inf
    for assignment in itertools.product(range(m), repeat=2 * n_blocks):
        s = c.points[np.array(assignment)].reshape(2, n_blocks)
        try:
            g_hat = estimate_channel(yt, s)
        except SingularError:
            continue
        r = residual(y, equivalent_channel(g_hat), s)
        if r < best_r:
            best_r = r
            best_s = s
    if best_s is None:
        raise SingularError("every candidate produced a singular system")
    return best_s, best_r


def projection_residual(y: np.ndarray, s: np.ndarray) -> float:
    """Channel-independent value of the blind criterion for fixed symbols.

    Computes ||y @ (I_N - s^H (s s^H)^{-1} s)||_F^2, which equals the
    residual of the best unstructured 4x2 channel fit for s.  Requires s
    to have full row rank.
    """
    y = np.asarray(y, dtype=np.complex128)
    s = np.asarray(s, dtype=np.complex128)
    n = s.shape[1]
    gram = s @ s.conj().T
    p_perp = np.eye(n) - s.conj().T @ hermitian_inverse_2x2(gram) @ s
    return frobenius_sq(y @ p_perp)


def unstructured_ls_residual(y: np.ndarray, s: np.ndarray) -> float:
    """Residual of the best unstructured 4x2 channel for fixed symbols.

    Solves min over x of ||y - x @ s||_F^2 directly; agrees with
    :func:`projection_residual` up to rounding and serves as its
    cross-check.
    """
    y = np.asarray(y, dtype=np.complex128)
    s = np.asarray(s, dtype=np.complex128)
    x_h = solve_normal_eq(s.conj().T, y.conj().T)
    return frobenius_sq(y - x_h.conj().T @ s)
