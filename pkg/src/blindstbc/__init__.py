"""Blind detection of Alamouti space-time block codes.

Library layout:

* :mod:`blindstbc.linalg` - tiny complex least-squares kernel.
* :mod:`blindstbc.constellation` - alphabets, slicer, error counting.
* :mod:`blindstbc.stbc` - code construction, signal representations, and
  the blind ambiguity group.
* :mod:`blindstbc.channel` - Rayleigh fading, noise, seeded substreams.
* :mod:`blindstbc.detect` - coherent ML, ILS, multi-start ILS, oracles.
* :mod:`blindstbc.harness` - Monte Carlo sweeps, histograms, CSV output.
* :mod:`blindstbc.matfile` - text format for complex matrices.
* :mod:`blindstbc.cli` - command-line entry point.
"""

from .channel import ChannelRealization, draw_channel, draw_noise, substream, transmit
from .constellation import (
    BPSK,
    QAM16,
    QPSK,
    Constellation,
    best_rotation_errors,
    count_bit_errors,
    count_symbol_errors,
    get_constellation,
    random_symbol_matrix,
    random_symbols,
    slice_matrix,
    slice_symbol,
)
from .detect import (
    DetectionResult,
    EilsConfig,
    EilsResult,
    EnumerationTooLarge,
    coherent_ml,
    detect_symbols,
    eils,
    estimate_channel,
    exhaustive_ls,
    ils,
    projection_residual,
    residual,
)
from .harness import (
    HistogramConfig,
    HistogramRecord,
    SweepConfig,
    SweepRecord,
    histogram_experiment,
    run_trial,
    sweep_q,
    sweep_samples,
    sweep_snr,
)
from .linalg import SingularError, frobenius_sq, hermitian, matmul, solve_normal_eq
from .stbc import (
    AmbiguityTransform,
    ambiguity_transforms,
    best_ambiguity_errors,
    code_form,
    encode_block,
    equivalent_channel,
    stack_codes,
    stack_received,
    symbol_form,
)

__version__ = "0.1.0"
