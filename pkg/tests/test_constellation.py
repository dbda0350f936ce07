"""Tests for alphabets, slicing, and error counting."""

import numpy as np
import pytest

from blindstbc.constellation import (
    BPSK,
    QAM16,
    QPSK,
    best_rotation_errors,
    count_bit_errors,
    count_symbol_errors,
    get_constellation,
    nearest_indices,
    random_symbol_matrix,
    random_symbols,
    slice_matrix,
    slice_symbol,
)

ALL = [BPSK, QPSK, QAM16]


class TestAlphabetInvariants:
    @pytest.mark.parametrize("c", ALL, ids=lambda c: c.name)
    def test_unit_mean_power(self, c):
        assert abs(np.mean(np.abs(c.points) ** 2) - 1.0) <= 1e-12

    @pytest.mark.parametrize("c", ALL, ids=lambda c: c.name)
    def test_points_distinct(self, c):
        assert len(np.unique(c.points)) == len(c.points)

    @pytest.mark.parametrize("c", ALL, ids=lambda c: c.name)
    def test_sizes(self, c):
        assert len(c.points) == 2**c.bits_per_symbol
        assert len(c.bit_labels) == len(c.points)
        assert sorted(c.bit_labels) == list(range(len(c.points)))

    @pytest.mark.parametrize("c", ALL, ids=lambda c: c.name)
    def test_rotations_permute_points(self, c):
        """Each symmetry rotation maps the point set exactly onto itself."""
        for rot in c.symmetry_rotations:
            rotated = rot * c.points
            idx = nearest_indices(rotated, c)
            assert sorted(idx) == list(range(len(c.points)))
            np.testing.assert_allclose(c.points[idx], rotated, atol=1e-12)

    @pytest.mark.parametrize("c", [QPSK, QAM16], ids=lambda c: c.name)
    def test_gray_adjacency(self, c):
        """Nearest neighbors differ in exactly one label bit."""
        for i, p in enumerate(c.points):
            d = np.abs(c.points - p)
            d[i] = np.inf
            j = int(np.argmin(d))
            diff = int(c.bit_labels[i]) ^ int(c.bit_labels[j])
            assert bin(diff).count("1") == 1

    def test_lookup_names(self):
        assert get_constellation("BPSK") is BPSK
        assert get_constellation("16qam") is QAM16
        assert get_constellation("qam16") is QAM16
        with pytest.raises(ValueError, match="unknown modulation"):
            get_constellation("8psk")


class TestSlicer:
    def test_bpsk_example(self):
        assert slice_symbol(0.3 - 0.2j, BPSK) == 1.0 + 0.0j

    def test_qpsk_nearest_neighbor(self):
        """Expected point derived by checking the distance to all four."""
        x = 0.9 + 0.1j
        dists = np.abs(x - QPSK.points)
        expected = QPSK.points[np.argmin(dists)]
        assert expected == (1 + 1j) / np.sqrt(2)
        assert slice_symbol(x, QPSK) == expected

    @pytest.mark.parametrize("c", ALL, ids=lambda c: c.name)
    def test_points_are_fixed(self, c):
        for p in c.points:
            assert slice_symbol(p, c) == p

    @pytest.mark.parametrize("c", ALL, ids=lambda c: c.name)
    def test_always_returns_member(self, c):
        rng = np.random.default_rng(20)
        x = 3 * (rng.normal(size=100) + 1j * rng.normal(size=100))
        sliced = slice_matrix(x, c)
        assert np.isin(sliced, c.points).all()

    @pytest.mark.parametrize("c", ALL, ids=lambda c: c.name)
    def test_rotated_points_fixed(self, c):
        for rot in c.symmetry_rotations:
            for p in c.points:
                assert slice_symbol(rot * p, c) == rot * p

    def test_matrix_matches_scalar(self):
        rng = np.random.default_rng(21)
        x = rng.normal(size=(2, 5)) + 1j * rng.normal(size=(2, 5))
        m = slice_matrix(x, QAM16)
        for i in range(2):
            for j in range(5):
                assert m[i, j] == slice_symbol(x[i, j], QAM16)

    def test_tie_breaks_to_lowest_index(self):
        # 0 is equidistant from both BPSK points; the first point wins.
        assert slice_symbol(0.0, BPSK) == BPSK.points[0]


class TestRandomSymbols:
    def test_empty(self):
        rng = np.random.default_rng(22)
        assert len(random_symbols(0, BPSK, rng)) == 0

    def test_uniform_frequencies(self):
        """Each BPSK point appears with frequency 0.5 to within 1%."""
        rng = np.random.default_rng(23)
        draws = random_symbols(100_000, BPSK, rng)
        frac = np.mean(draws == BPSK.points[0])
        assert abs(frac - 0.5) < 0.01

    def test_seed_determinism(self):
        a = random_symbols(64, QAM16, np.random.default_rng(24))
        b = random_symbols(64, QAM16, np.random.default_rng(24))
        np.testing.assert_array_equal(a, b)

    def test_matrix_shape_and_alphabet(self):
        rng = np.random.default_rng(25)
        s = random_symbol_matrix(QPSK, 7, rng)
        assert s.shape == (2, 7)
        assert np.isin(s, QPSK.points).all()

    def test_negative_count_rejected(self):
        with pytest.raises(ValueError):
            random_symbols(-1, BPSK, np.random.default_rng(0))


class TestErrorCounting:
    def test_identity_alignment(self):
        rng = np.random.default_rng(26)
        s = random_symbol_matrix(QPSK, 10, rng)
        assert best_rotation_errors(s, s, QPSK) == (1 + 0j, 0)

    def test_bpsk_sign_flip_absorbed(self):
        rng = np.random.default_rng(27)
        s = random_symbol_matrix(BPSK, 10, rng)
        rot, errors = best_rotation_errors(-s, s, BPSK)
        assert rot == -1 + 0j
        assert errors == 0

    def test_corruption_count(self):
        """Flipping k entries yields exactly k mismatches at rotation 1."""
        rng = np.random.default_rng(28)
        s = random_symbol_matrix(BPSK, 20, rng)
        corrupted = s.copy()
        flips = [(0, 1), (1, 5), (0, 12)]
        for i, j in flips:
            corrupted[i, j] = -corrupted[i, j]
        rot, errors = best_rotation_errors(corrupted, s, BPSK)
        assert rot == 1 + 0j
        assert errors == len(flips)

    def test_symbol_and_bit_counts(self):
        s_true = np.array([QAM16.points[:4], QAM16.points[4:8]])
        s_hat = s_true.copy()
        s_hat[0, 0] = QAM16.points[8]
        assert count_symbol_errors(s_hat, s_true, QAM16) == 1
        expected_bits = bin(int(QAM16.bit_labels[0]) ^ int(QAM16.bit_labels[8])).count("1")
        assert count_bit_errors(s_hat, s_true, QAM16) == expected_bits

    def test_shape_mismatch_rejected(self):
        with pytest.raises(ValueError, match="equal shapes"):
            best_rotation_errors(np.ones((2, 3)), np.ones((2, 4)), BPSK)
