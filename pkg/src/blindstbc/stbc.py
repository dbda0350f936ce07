"""Alamouti code construction and the equivalent signal representations.

Conventions used throughout the package:

* A code block for the symbol pair (s1, s2) is the 2x2 matrix
  ``[[s1, s2], [-conj(s2), conj(s1)]]`` (rows are time slots, columns are
  transmit antennas).
* The physical channel is a 2x2 matrix ``g`` whose (i, j) entry couples
  transmit row i to receive column j of a block.
* ``code form``: received blocks stacked vertically into a 2N x 2 matrix,
  in which the stacked code matrix appears linearly (``yt = c @ g``).
* ``symbol form``: a 4 x N matrix whose column n is
  ``[y11, conj(y12), y21, conj(y22)]`` for block n, in which the symbols
  appear linearly through the 4x2 equivalent channel (``y = h @ s``).
  Entries 2 and 4 of each column are conjugated received samples.

The two forms describe the same samples entry for entry (up to
conjugation), so Frobenius residuals agree exactly between them.

The module also exposes the blind ambiguity group of this code: the set
of symbol-matrix transformations that a structured blind detector cannot
distinguish from the truth, because each has an exactly matching channel
counterpart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import Constellation, nearest_indices, _POPCOUNT4


def encode_block(s1: complex, s2: complex) -> np.ndarray:
    """2x2 Alamouti block for one symbol pair."""
    return np.array(
        [[s1, s2], [-np.conj(s2), np.conj(s1)]], dtype=np.complex128
    )


def stack_codes(s: np.ndarray) -> np.ndarray:
    """Stack the blocks of a 2 x N symbol matrix into a 2N x 2 code matrix."""
    s = np.asarray(s, dtype=np.complex128)
    if s.ndim != 2 or s.shape[0] != 2 or s.shape[1] < 1:
        raise ValueError(f"expected a 2 x N symbol matrix, got shape {s.shape}")
    n = s.shape[1]
    c = np.empty((2 * n, 2), dtype=np.complex128)
    c[0::2, 0] = s[0]
    c[0::2, 1] = s[1]
    c[1::2, 0] = -np.conj(s[1])
    c[1::2, 1] = np.conj(s[0])
    return c


def equivalent_channel(g: np.ndarray) -> np.ndarray:
    """4x2 equivalent channel embedding the code structure.

    Columns of the result are orthogonal with common squared norm equal to
    the total channel energy sum(|g_ij|^2), for every g.
    """
    g = np.asarray(g, dtype=np.complex128)
    if g.shape != (2, 2):
        raise ValueError(f"expected a 2x2 channel matrix, got shape {g.shape}")
    h11, h12 = g[0, 0], g[0, 1]
    h21, h22 = g[1, 0], g[1, 1]
    return np.array(
        [
            [h11, h21],
            [np.conj(h21), -np.conj(h11)],
            [h12, h22],
            [np.conj(h22), -np.conj(h12)],
        ],
        dtype=np.complex128,
    )


def symbol_form(yt: np.ndarray) -> np.ndarray:
    """Convert code form (2N x 2) to symbol form (4 x N)."""
    yt = np.asarray(yt, dtype=np.complex128)
    if yt.ndim != 2 or yt.shape[1] != 2 or yt.shape[0] % 2 != 0 or yt.shape[0] < 2:
        raise ValueError(f"expected a 2N x 2 matrix, got shape {yt.shape}")
    n = yt.shape[0] // 2
    y = np.empty((4, n), dtype=np.complex128)
    y[0] = yt[0::2, 0]
    y[1] = np.conj(yt[1::2, 0])
    y[2] = yt[0::2, 1]
    y[3] = np.conj(yt[1::2, 1])
    return y


def code_form(y: np.ndarray) -> np.ndarray:
    """Convert symbol form (4 x N) back to code form (2N x 2)."""
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 2 or y.shape[0] != 4 or y.shape[1] < 1:
        raise ValueError(f"expected a 4 x N matrix, got shape {y.shape}")
    n = y.shape[1]
    yt = np.empty((2 * n, 2), dtype=np.complex128)
    yt[0::2, 0] = y[0]
    yt[1::2, 0] = np.conj(y[1])
    yt[0::2, 1] = y[2]
    yt[1::2, 1] = np.conj(y[3])
    return yt


def stack_received(blocks) -> tuple[np.ndarray, np.ndarray]:
    """Assemble both received-signal representations from 2x2 blocks.

    Returns (symbol form 4 x N, code form 2N x 2) built from the same
    samples; both carry identical Frobenius norm.
    """
    blocks = [np.asarray(b, dtype=np.complex128) for b in blocks]
    if len(blocks) < 1:
        raise ValueError("need at least one received block")
    for b in blocks:
        if b.shape != (2, 2):
            raise ValueError(f"received blocks must be 2x2, got {b.shape}")
    yt = np.vstack(blocks)
    return symbol_form(yt), yt


@dataclass(frozen=True)
class AmbiguityTransform:
    """One element of the code's blind ambiguity group.

    kind "scale": (s1, s2) -> (w * s1, conj(w) * s2) per block.
    kind "swap":  (s1, s2) -> (-conj(w) * s2, w * s1) per block.

    Right-multiplying every code block by a fixed unit 2x2 matrix of the
    same code structure yields another valid code matrix while the channel
    absorbs the inverse factor, so these transforms leave every structured
    least-squares residual exactly unchanged.
    """

    kind: str
    factor: complex

    def apply(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s)
        if self.kind == "scale":
            return np.vstack((self.factor * s[0], np.conj(self.factor) * s[1]))
        return np.vstack((-np.conj(self.factor) * s[1], self.factor * s[0]))

    def label(self) -> str:
        return f"{self.kind}[{self.factor.real:+g}{self.factor.imag:+g}j]"


def ambiguity_transforms(c: Constellation) -> list[AmbiguityTransform]:
    """All blind ambiguities compatible with the alphabet's rotations.

    Identity comes first so exact agreement aligns trivially.
    """
    scales = [AmbiguityTransform("scale", complex(w)) for w in c.symmetry_rotations]
    swaps = [AmbiguityTransform("swap", complex(w)) for w in c.symmetry_rotations]
    return scales + swaps


def best_ambiguity_errors(
    s_hat: np.ndarray, s_true: np.ndarray, c: Constellation
) -> tuple[AmbiguityTransform, int, int]:
    """Error counts minimized over the blind ambiguity group.

    Returns (best transform, symbol errors, bit errors under it).  The
    transform is chosen to minimize symbol errors, ties keeping the first
    candidate (identity first), and bit errors are counted under that same
    transform.
    """
    s_hat = np.asarray(s_hat)
    s_true = np.asarray(s_true)
    if s_hat.shape != s_true.shape:
        raise ValueError("symbol matrices must have equal shapes")
    true_ix = nearest_indices(s_true, c)
    true_labels = c.bit_labels[true_ix]
    best = None
    for tr in ambiguity_transforms(c):
        ix = nearest_indices(tr.apply(s_hat), c)
        sym = int(np.sum(ix != true_ix))
        if best is None or sym < best[1]:
            bits = int(_POPCOUNT4[np.bitwise_xor(c.bit_labels[ix], true_labels)].sum())
            best = (tr, sym, bits)
            if sym == 0:
                break
    return best
