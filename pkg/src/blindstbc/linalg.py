"""Small dense complex-matrix kernel for the least-squares inner loops.

Matrices are plain two-dimensional ``numpy.ndarray`` values with
``complex128`` dtype.  Everything here is tiny (at most 2N x 2), so all
operations copy their inputs and return fresh arrays; nothing mutates in
place, and identical inputs give bitwise-identical outputs.
"""

from __future__ import annotations

import numpy as np

# Relative tolerance on |det(A^H A)| / trace(A^H A)^2 below which a normal
# system is treated as singular.  Random fading channels essentially never
# trip this; it guards degenerate synthetic inputs.
SINGULARITY_TOL = 1e-12


class SingularError(ValueError):
    """Normal equations are singular (matrix has deficient column rank)."""


def cmatrix(rows) -> np.ndarray:
    """Build a validated complex matrix from nested scalars.

    Rejects non-2D shapes and non-finite entries.
    """
    a = np.array(rows, dtype=np.complex128)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Complex matrix product a @ b with an explicit dimension check."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("matmul operands must be 2-D")
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"dimension mismatch: {a.shape} @ {b.shape}")
    return a @ b


def hermitian(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T.copy()


def frobenius_sq(a: np.ndarray) -> float:
    """Squared Frobenius norm, the sum of squared entry moduli."""
    a = np.asarray(a)
    return float(np.real(np.vdot(a, a)))


def hermitian_inverse_2x2(m: np.ndarray) -> np.ndarray:
    """Invert a 2x2 Hermitian matrix by its adjugate.

    Raises SingularError when |det| falls below SINGULARITY_TOL relative
    to trace(m)^2.
    """
    m = np.asarray(m)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
    m00 = m[0, 0].real
    m11 = m[1, 1].real
    m01 = m[0, 1]
    det = m00 * m11 - (m01.real * m01.real + m01.imag * m01.imag)
    trace = m00 + m11
    if trace <= 0.0 or abs(det) < SINGULARITY_TOL * trace * trace:
        raise SingularError("2x2 Hermitian system is singular or near-singular")
    return np.array([[m11, -m01], [-np.conj(m01), m00]], dtype=np.complex128) / det


def solve_normal_eq(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Least-squares solution X of min ||b - a X||_F via normal equations.

    Supports coefficient matrices with one or two columns, which covers
    every system in this package; the 2-column case uses the closed-form
    Hermitian inverse instead of a general factorization.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("solve_normal_eq operands must be 2-D")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"row mismatch: a is {a.shape}, b is {b.shape}")
    rhs = a.conj().T @ b
    if a.shape[1] == 1:
        gram = float(np.real(np.vdot(a, a)))
        if gram <= 0.0:
            raise SingularError("column is zero")
        return rhs / gram
    if a.shape[1] == 2:
        gram = a.conj().T @ a
        return hermitian_inverse_2x2(gram) @ rhs
    raise ValueError("only 1- or 2-column systems are supported")
