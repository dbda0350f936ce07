"""Certifying the iterative detector against exhaustive search.

At tiny burst lengths the blind least-squares problem can be solved
exactly by enumerating every symbol matrix.  This script compares the
multi-start detector's residual with that global optimum trial by trial:
the iterative answer can never fall below it, and with a modest restart
budget it hits it essentially always.  The same exhaustive oracle backs
the package's acceptance tests.
"""

import numpy as np

from blindstbc import (
    BPSK,
    ChannelRealization,
    EilsConfig,
    draw_channel,
    eils,
    exhaustive_ls,
    random_symbol_matrix,
    substream,
    transmit,
)

N_BLOCKS = 4       # 2^(2N) = 256 candidate symbol matrices
SNR_DB = 8.0
TRIALS = 100

power = 10.0 ** (SNR_DB / 10.0)
matches = 0
gaps = []
for trial in range(TRIALS):
    g = draw_channel(substream(7, trial, 0))
    s = random_symbol_matrix(BPSK, N_BLOCKS, substream(7, trial, 1))
    ch = ChannelRealization(g=g, power_p=power, noise_var=1.0)
    y, yt = transmit(s, ch, substream(7, trial, 2))

    result = eils(y, yt, BPSK, EilsConfig(q=20, t=3), substream(7, trial, 4))
    _, r_star = exhaustive_ls(y, BPSK)

    assert result.best.residual >= r_star - 1e-9 * max(r_star, 1.0), \
        "iterative residual fell below the global optimum"
    gap = result.best.residual - r_star
    gaps.append(gap)
    if abs(gap) <= 1e-9 * max(r_star, 1.0):
        matches += 1

print(f"BPSK, N={N_BLOCKS} blocks, SNR {SNR_DB:.0f} dB, {TRIALS} trials")
print(f"multi-start detector reached the exhaustive optimum in "
      f"{matches}/{TRIALS} trials")
print(f"largest residual excess over the optimum: {max(gaps):.3e}")
print(f"(the dominance direction is exact: min gap {min(gaps):.3e} >= 0 "
      "up to rounding)")
print()
print(f"mean |gap| {np.mean(np.abs(gaps)):.3e}; "
      "raise the restart budget q to push the match rate toward 1")
