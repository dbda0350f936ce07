"""Tests for the detectors and their oracles."""

import itertools
import math

import numpy as np
import pytest

from blindstbc.channel import ChannelRealization, draw_channel, substream, transmit
from blindstbc.constellation import BPSK, QPSK, random_symbol_matrix
from blindstbc.detect import (
    DetectionResult,
    EilsConfig,
    EnumerationTooLarge,
    coherent_ml,
    detect_symbols,
    eils,
    estimate_channel,
    exhaustive_ls,
    ils,
    projection_residual,
    residual,
    unstructured_ls_residual,
)
from blindstbc.linalg import SingularError, frobenius_sq, solve_normal_eq
from blindstbc.stbc import (
    best_ambiguity_errors,
    code_form,
    equivalent_channel,
    stack_codes,
)


def _burst(seed, c, n_blocks, snr_db, noise_var=1.0):
    """One random burst; returns (y, yt, s_true, g, power)."""
    power = noise_var * 10.0 ** (snr_db / 10.0)
    g = draw_channel(substream(seed, 0))
    s = random_symbol_matrix(c, n_blocks, substream(seed, 1))
    ch = ChannelRealization(g=g, power_p=power, noise_var=noise_var)
    y, yt = transmit(s, ch, substream(seed, 2))
    return y, yt, s, g, power


def _noiseless_burst(seed, c, n_blocks, power=1.0):
    g = draw_channel(substream(seed, 0))
    s = random_symbol_matrix(c, n_blocks, substream(seed, 1))
    ch = ChannelRealization(g=g, power_p=power, noise_var=0.0)
    y, yt = transmit(s, ch, np.random.default_rng(0))
    return y, yt, s, g


def _alamouti_bpsk_ber(snr_db):
    """Closed-form BPSK error rate for 4-branch maximal-ratio combining.

    Branch SNR is P/2 with unit noise power; standard Rayleigh diversity
    integral in closed form.
    """
    gamma = 10.0 ** (snr_db / 10.0) / 2.0
    mu = math.sqrt(gamma / (1.0 + gamma))
    order = 4
    total = sum(
        math.comb(order - 1 + k, k) * ((1.0 + mu) / 2.0) ** k for k in range(order)
    )
    return ((1.0 - mu) / 2.0) ** order * total


class TestCoherentMl:
    def test_noiseless_recovery(self):
        y, _, s, g = _noiseless_burst(50, QPSK, 10, power=2.0)
        h_eff = equivalent_channel(g)  # sqrt(P/2) = 1
        np.testing.assert_array_equal(coherent_ml(y, h_eff, QPSK), s)

    def test_scale_invariance(self):
        y, _, s, g, power = _burst(51, BPSK, 10, snr_db=8.0)
        h_eff = np.sqrt(power / 2) * equivalent_channel(g)
        a = coherent_ml(y, h_eff, BPSK)
        b = coherent_ml(3.0 * y, 3.0 * h_eff, BPSK)
        np.testing.assert_array_equal(a, b)

    def test_ber_near_analytic_diversity_bound(self):
        """Monte Carlo BER within 3x of the closed-form 4-branch value."""
        snr_db, n_blocks, trials = 10.0, 20, 4000
        errors = 0
        for t in range(trials):
            y, _, s, g, power = _burst(1000 + t, BPSK, n_blocks, snr_db)
            h_eff = np.sqrt(power / 2) * equivalent_channel(g)
            s_hat = coherent_ml(y, h_eff, BPSK)
            errors += int(np.sum(s_hat != s))
        ber = errors / (trials * 2 * n_blocks)
        analytic = _alamouti_bpsk_ber(snr_db)
        assert analytic / 3 <= ber <= 3 * analytic

    def test_zero_channel_singular(self):
        with pytest.raises(SingularError):
            coherent_ml(np.ones((4, 2), dtype=complex), np.zeros((4, 2)), BPSK)


class TestEstimateChannel:
    def test_noiseless_recovers_effective_channel(self):
        y, yt, s, g = _noiseless_burst(52, QPSK, 8, power=8.0)
        g_hat = estimate_channel(yt, s)
        np.testing.assert_allclose(g_hat, 2.0 * g, atol=1e-10)

    def test_hand_example_single_block(self):
        """N=1, s=(1,1), G=I, P=2: the code block is its own best fit."""
        ch = ChannelRealization(g=np.eye(2, dtype=complex), power_p=2.0, noise_var=0.0)
        s = np.array([[1.0 + 0j], [1.0 + 0j]])
        _, yt = transmit(s, ch, np.random.default_rng(0))
        np.testing.assert_allclose(estimate_channel(yt, s), np.eye(2), atol=1e-14)

    def test_diagonal_shortcut_matches_general_solve(self):
        """C^H C is a scaled identity, so the matched-filter shortcut and
        the full normal-equation solve agree."""
        rng = np.random.default_rng(53)
        s = random_symbol_matrix(QPSK, 6, rng)
        yt = rng.normal(size=(12, 2)) + 1j * rng.normal(size=(12, 2))
        c = stack_codes(s)
        shortcut = c.conj().T @ yt / float(np.sum(np.abs(s) ** 2))
        np.testing.assert_allclose(estimate_channel(yt, s), shortcut, rtol=1e-12)

    def test_zero_symbols_singular(self):
        with pytest.raises(SingularError):
            estimate_channel(np.ones((4, 2), dtype=complex), np.zeros((2, 2)))


class TestDetectSymbols:
    def test_noiseless_with_estimated_channel(self):
        y, yt, s, _ = _noiseless_burst(54, BPSK, 10, power=2.0)
        g_hat = estimate_channel(yt, s)
        np.testing.assert_array_equal(detect_symbols(y, g_hat, BPSK), s)

    def test_zero_channel_singular(self):
        with pytest.raises(SingularError):
            detect_symbols(np.ones((4, 3), dtype=complex), np.zeros((2, 2)), BPSK)


class TestResidual:
    def test_exact_fit_zero(self):
        y, yt, s, _ = _noiseless_burst(55, BPSK, 6, power=2.0)
        g_hat = estimate_channel(yt, s)
        assert residual(y, equivalent_channel(g_hat), s) <= 1e-20

    def test_equals_code_form_objective(self):
        """With the least-squares channel, the symbol-form residual equals
        the code-form objective min_g ||yt - C g||^2, computed separately."""
        y, yt, s, *_ = _burst(56, BPSK, 8, snr_db=5.0)
        g_hat = estimate_channel(yt, s)
        r_symbol = residual(y, equivalent_channel(g_hat), s)
        r_code = frobenius_sq(yt - stack_codes(s) @ g_hat)
        assert r_symbol == pytest.approx(r_code, rel=1e-9)

    def test_positive_off_model(self):
        y, yt, s, _ = _noiseless_burst(57, BPSK, 6, power=2.0)
        g_hat = estimate_channel(yt, s)
        assert residual(y + 0.5, equivalent_channel(g_hat), s) > 0.1


class TestIls:
    def test_true_init_noiseless_converges_immediately(self):
        y, yt, s, _ = _noiseless_burst(58, QPSK, 20, power=2.0)
        result = ils(y, yt, QPSK, init=s)
        assert result.converged
        assert result.iterations == 1
        assert result.residual <= 1e-18
        np.testing.assert_array_equal(result.s_hat, s)

    def test_monotone_residuals(self):
        """Replaying the alternation by hand shows a non-increasing
        residual on every run."""
        for seed in range(30):
            y, yt, _, _, _ = _burst(600 + seed, BPSK, 12, snr_db=4.0)
            s_cur = random_symbol_matrix(BPSK, 12, substream(seed, 9))
            prev = np.inf
            for _ in range(25):
                g_hat = estimate_channel(yt, s_cur)
                s_next = detect_symbols(y, g_hat, BPSK)
                r = residual(y, equivalent_channel(g_hat), s_next)
                assert r <= prev + 1e-9 * max(prev, 1.0)
                if np.array_equal(s_next, s_cur):
                    break
                prev = r
                s_cur = s_next

    def test_fixed_point_soundness(self):
        """One more full alternation from a converged output reproduces it."""
        y, yt, *_ = _burst(59, BPSK, 15, snr_db=8.0)
        init = random_symbol_matrix(BPSK, 15, substream(59, 9))
        result = ils(y, yt, BPSK, init)
        assert result.converged
        g_next = estimate_channel(yt, result.s_hat)
        s_next = detect_symbols(y, g_next, BPSK)
        np.testing.assert_array_equal(s_next, result.s_hat)

    def test_mean_iterations_small(self):
        """Random-init runs settle in a handful of alternations (2 to 5 on
        average at moderate SNR)."""
        runs, total = 2000, 0
        y = yt = None
        for r in range(runs):
            if r % 50 == 0:
                y, yt, *_ = _burst(7000 + r, BPSK, 20, snr_db=8.0)
            init = random_symbol_matrix(BPSK, 20, substream(123, r))
            result = ils(y, yt, BPSK, init)
            total += result.iterations
        assert 2.0 <= total / runs <= 5.0

    def test_result_residual_recomputable(self):
        y, yt, *_ = _burst(60, QPSK, 10, snr_db=6.0)
        init = random_symbol_matrix(QPSK, 10, substream(60, 9))
        result = ils(y, yt, QPSK, init)
        recomputed = residual(y, result.h_hat, result.s_hat)
        assert result.residual == pytest.approx(recomputed, rel=1e-9)


class TestEils:
    def test_q1_equals_single_run(self):
        y, yt, *_ = _burst(61, BPSK, 10, snr_db=6.0)
        rng_a = substream(61, 7)
        rng_b = substream(61, 7)
        single = ils(y, yt, BPSK, random_symbol_matrix(BPSK, 10, rng_a))
        multi = eils(y, yt, BPSK, EilsConfig(q=1, t=1), rng_b)
        assert multi.executions == 1
        assert not multi.stopped_by_majority
        assert multi.best.residual == single.residual
        np.testing.assert_array_equal(multi.best.s_hat, single.s_hat)

    def test_noiseless_recovery(self):
        """Zero residual and zero aligned errors in nearly every trial."""
        hits = 0
        trials = 100
        for t in range(trials):
            y, yt, s, _ = _noiseless_burst(8000 + t, BPSK, 20, power=1.0)
            res = eils(y, yt, BPSK, EilsConfig(q=20, t=2), substream(8000 + t, 4))
            _, sym, _ = best_ambiguity_errors(res.best.s_hat, s, BPSK)
            if res.best.residual <= 1e-18 and sym == 0:
                hits += 1
        assert hits >= 97

    def test_breaks_majority_early(self):
        y, yt, *_ = _noiseless_burst(62, BPSK, 20, power=1.0)
        res = eils(y, yt, BPSK, EilsConfig(q=50, t=2), substream(62, 4))
        assert res.stopped_by_majority
        assert res.executions < 50

    def test_invariants(self):
        y, yt, *_ = _burst(63, QPSK, 10, snr_db=6.0)
        res = eils(y, yt, QPSK, EilsConfig(q=10, t=3), substream(63, 4))
        assert res.best.residual == min(res.residual_history)
        assert res.executions == len(res.residual_history) <= 10

    def test_history_dominates_best(self):
        y, yt, *_ = _burst(64, BPSK, 8, snr_db=2.0)
        res = eils(y, yt, BPSK, EilsConfig(q=15, t=20), substream(64, 4))
        assert not res.stopped_by_majority
        assert res.executions == 15
        for r in res.residual_history:
            assert r >= res.best.residual

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError):
            EilsConfig(q=0, t=1)
        with pytest.raises(ValueError):
            EilsConfig(q=1, t=0)


class TestExhaustiveLs:
    def test_noiseless_global_optimum(self):
        y, _, s, _ = _noiseless_burst(65, BPSK, 4, power=1.0)
        s_star, r_star = exhaustive_ls(y, BPSK)
        assert r_star <= 1e-18
        _, sym, _ = best_ambiguity_errors(s_star, s, BPSK)
        assert sym == 0

    def test_dominates_eils(self):
        for seed in range(10):
            y, yt, *_ = _burst(900 + seed, BPSK, 4, snr_db=6.0)
            s_star, r_star = exhaustive_ls(y, BPSK)
            res = eils(y, yt, BPSK, EilsConfig(q=10, t=2), substream(seed, 4))
            assert r_star <= res.best.residual + 1e-9 * max(res.best.residual, 1.0)

    def test_matches_projection_brute_force(self):
        """Independent enumeration through the code-form projector finds the
        same optimum value."""
        y, *_ = _burst(66, BPSK, 3, snr_db=8.0)
        yt = code_form(y)
        best = np.inf
        for bits in itertools.product(range(2), repeat=6):
            s = BPSK.points[np.array(bits)].reshape(2, 3)
            c = stack_codes(s)
            proj = np.eye(6) - c @ np.linalg.pinv(c)
            best = min(best, frobenius_sq(proj @ yt))
        _, r_star = exhaustive_ls(y, BPSK)
        assert r_star == pytest.approx(best, rel=1e-9)

    def test_enumeration_cap(self):
        y = np.ones((4, 3), dtype=complex)
        with pytest.raises(EnumerationTooLarge):
            exhaustive_ls(y, BPSK, enumeration_cap=63)


class TestProjectionCriterion:
    def test_matches_unstructured_channel_fit(self):
        """Channel-minimized residual equals the projector value."""
        rng = np.random.default_rng(67)
        for _ in range(50):
            n = int(rng.integers(2, 7))
            s = random_symbol_matrix(BPSK, n, rng)
            if np.linalg.matrix_rank(s) < 2:
                continue
            y = rng.normal(size=(4, n)) + 1j * rng.normal(size=(4, n))
            a = unstructured_ls_residual(y, s)
            b = projection_residual(y, s)
            assert a == pytest.approx(b, rel=1e-9)

    def test_unstructured_below_structured(self):
        """The unstructured channel fit can only improve on the structured
        one, never exceed it."""
        y, yt, s, *_ = _burst(68, BPSK, 5, snr_db=6.0)
        g_hat = estimate_channel(yt, s)
        structured = residual(y, equivalent_channel(g_hat), s)
        assert unstructured_ls_residual(y, s) <= structured + 1e-12

    def test_rank_deficient_rejected(self):
        s = np.ones((2, 4), dtype=complex)
        with pytest.raises(SingularError):
            projection_residual(np.ones((4, 4), dtype=complex), s)
