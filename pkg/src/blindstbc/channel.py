"""Quasi-static flat Rayleigh channel and white Gaussian noise generation.

Randomness policy: all draws come from ``numpy.random.Generator`` streams
built by :func:`substream`, which mixes an arbitrary integer path (seed,
trial index, purpose tag, ...) through ``numpy.random.SeedSequence`` into
a PCG64 state.  Distinct paths give statistically independent streams, so
Monte Carlo trials can run in any order or in parallel and still
reproduce identical results for a given base seed.  Normal variates
use NumPy's ziggurat sampler; cross-platform bit-exactness is not a
contract, statistical behavior is.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stbc import equivalent_channel, stack_codes, symbol_form


def substream(seed: int, *path: int) -> np.random.Generator:
    """Independent generator for the given (seed, *path) derivation path."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, *path))))


@dataclass(frozen=True)
class ChannelRealization:
    """One channel draw plus the transmit power and noise level in force.

    snr = power_p / noise_var.  The 4x2 equivalent channel is derived from
    g on demand, so the two can never fall out of sync.
    """

    g: np.ndarray
    power_p: float
    noise_var: float

    def __post_init__(self):
        if self.power_p < 0:
            raise ValueError("power_p must be >= 0")
        if self.noise_var < 0:
            raise ValueError("noise_var must be >= 0")

    @property
    def h(self) -> np.ndarray:
        return equivalent_channel(self.g)

    @property
    def snr(self) -> float:
        return self.power_p / self.noise_var


def draw_channel(rng: np.random.Generator) -> np.ndarray:
    """2x2 matrix of i.i.d. unit-variance circular complex Gaussians."""
    re = rng.normal(size=(2, 2))
    im = rng.normal(size=(2, 2))
    return (re + 1j * im) / np.sqrt(2.0)


def draw_noise(rows: int, cols: int, noise_var: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian matrix with per-entry variance noise_var."""
    if noise_var < 0:
        raise ValueError("noise_var must be >= 0")
    re = rng.normal(size=(rows, cols))
    im = rng.normal(size=(rows, cols))
    return np.sqrt(noise_var / 2.0) * (re + 1j * im)


def transmit(
    s: np.ndarray, ch: ChannelRealization, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Simulate one burst through the channel.

    Returns (symbol form 4 x N, code form 2N x 2) of the received signal.
    A single noise draw feeds both representations, so they describe the
    same received samples; the channel stays fixed across all N blocks.
    """
    s = np.asarray(s, dtype=np.complex128)
    n_blocks = s.shape[1]
    c = stack_codes(s)
    z = draw_noise(2 * n_blocks, 2, ch.noise_var, rng)
    yt = np.sqrt(ch.power_p / 2.0) * (c @ ch.g) + z
    return symbol_form(yt), yt
