"""Modulation alphabets, hard-decision slicing, and error counting.

Shipped alphabets are BPSK, QPSK, and 16-QAM, all normalized to unit mean
symbol power.  Bit labels are Gray-coded independently per I/Q axis, so
nearest-neighbor symbol errors cost one bit.  Each constellation also
carries the set of unit-modulus rotations that map the point set onto
itself; blind detectors can only recover symbols up to such ambiguities,
and all error counting against a known reference goes through the
alignment helpers below.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_POPCOUNT4 = np.array([bin(v).count("1") for v in range(16)], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class Constellation:
    """A finite normalized symbol alphabet.

    Attributes:
        name: canonical lowercase name ("bpsk", "qpsk", "16qam").
        points: complex points with unit mean power, in a fixed order that
            also defines deterministic tie-breaking for the slicer.
        bit_labels: per-point integer bit patterns (Gray-coded per axis).
        bits_per_symbol: label width in bits.
        symmetry_rotations: unit-modulus scalars r with r * points = points
            as a set.
    """

    name: str
    points: np.ndarray
    bit_labels: np.ndarray
    bits_per_symbol: int
    symmetry_rotations: np.ndarray


def _gray(index: int) -> int:
    return index ^ (index >> 1)


def _square_qam(name: str, levels: np.ndarray, rotations) -> Constellation:
    n = len(levels)
    scale = np.sqrt(np.mean(levels**2) * 2.0)
    points = []
    labels = []
    bits_per_axis = int(np.log2(n))
    for i in range(n):
        for q in range(n):
            points.append((levels[i] + 1j * levels[q]) / scale)
            labels.append((_gray(i) << bits_per_axis) | _gray(q))
    return Constellation(
        name=name,
        points=np.array(points, dtype=np.complex128),
        bit_labels=np.array(labels, dtype=np.uint8),
        bits_per_symbol=2 * bits_per_axis,
        symmetry_rotations=np.array(rotations, dtype=np.complex128),
    )


BPSK = Constellation(
    name="bpsk",
    points=np.array([-1.0 + 0.0j, 1.0 + 0.0j]),
    bit_labels=np.array([0, 1], dtype=np.uint8),
    bits_per_symbol=1,
    symmetry_rotations=np.array([1.0 + 0.0j, -1.0 + 0.0j]),
)

QPSK = _square_qam("qpsk", np.array([-1.0, 1.0]), [1.0, 1.0j, -1.0, -1.0j])

QAM16 = _square_qam("16qam", np.array([-3.0, -1.0, 1.0, 3.0]), [1.0, 1.0j, -1.0, -1.0j])

_BY_NAME = {
    "bpsk": BPSK,
    "qpsk": QPSK,
    "16qam": QAM16,
    "qam16": QAM16,
}


def get_constellation(name: str) -> Constellation:
    """Look up a shipped constellation by name (case-insensitive)."""
    try:
        return _BY_NAME[name.lower()]
    except KeyError:
        raise ValueError(
            f"unknown modulation {name!r}; choose from bpsk, qpsk, 16qam"
        ) from None


def nearest_indices(x, c: Constellation) -> np.ndarray:
    """Indices of the nearest constellation point for each entry of x.

    Ties break toward the lowest point index.
    """
    x = np.asarray(x, dtype=np.complex128)
    d = np.abs(x[..., None] - c.points)
    return np.argmin(d, axis=-1)


def slice_symbol(x: complex, c: Constellation) -> complex:
    """Hard decision: project one complex value to the closest point."""
    return complex(c.points[nearest_indices(np.asarray(x), c)])


def slice_matrix(x: np.ndarray, c: Constellation) -> np.ndarray:
    """Elementwise hard decision on a complex matrix."""
    return c.points[nearest_indices(x, c)]


def random_symbols(count: int, c: Constellation, rng: np.random.Generator) -> np.ndarray:
    """Draw i.i.d. uniform symbols from the alphabet."""
    if count < 0:
        raise ValueError("count must be >= 0")
    return c.points[rng.integers(0, len(c.points), size=count)]


def random_symbol_matrix(c: Constellation, n_blocks: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform 2 x N symbol matrix (row-major fill of 2N draws)."""
    return random_symbols(2 * n_blocks, c, rng).reshape(2, n_blocks)


def count_symbol_errors(s_a: np.ndarray, s_b: np.ndarray, c: Constellation) -> int:
    """Number of positions whose sliced symbols differ."""
    return int(np.sum(nearest_indices(s_a, c) != nearest_indices(s_b, c)))


def count_bit_errors(s_a: np.ndarray, s_b: np.ndarray, c: Constellation) -> int:
    """Number of differing label bits between the sliced symbol matrices."""
    la = c.bit_labels[nearest_indices(s_a, c)]
    lb = c.bit_labels[nearest_indices(s_b, c)]
    return int(_POPCOUNT4[np.bitwise_xor(la, lb)].sum())


def best_rotation_errors(
    s_hat: np.ndarray, s_true: np.ndarray, c: Constellation
) -> tuple[complex, int]:
    """Symbol-error count minimized over common constellation rotations.

    Applies each symmetry rotation to s_hat, slices, and counts mismatches
    against s_true; returns the best rotation and its count.  Ties keep the
    first (identity-first) rotation.
    """
    s_hat = np.asarray(s_hat)
    s_true = np.asarray(s_true)
    if s_hat.shape != s_true.shape:
        raise ValueError("symbol matrices must have equal shapes")
    true_ix = nearest_indices(s_true, c)
    best_rot = complex(c.symmetry_rotations[0])
    best_count = None
    for rot in c.symmetry_rotations:
        count = int(np.sum(nearest_indices(rot * s_hat, c) != true_ix))
        if best_count is None or count < best_count:
            best_rot = complex(rot)
            best_count = count
    return best_rot, best_count
