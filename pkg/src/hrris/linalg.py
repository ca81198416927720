"""Small dense complex linear algebra.

Matrices are plain ``numpy.complex128`` arrays. Products and conjugate
transposes go through numpy; determinant and inverse use a hand-written LU
factorization with partial pivoting so the singularity rule below is explicit
and independent of LAPACK behaviour.
"""

import numpy as np

# Pivot magnitude below SINGULAR_RTOL * max|a_ij| makes inverse() give up.
SINGULAR_RTOL = 1e-12


class ShapeError(ValueError):
    """Raised when operand shapes are incompatible."""


class SingularMatrixError(ArithmeticError):
    """Raised when a pivot falls below the singularity floor.

    Attributes
    ----------
    pivot : float
        Magnitude of the offending pivot.
    floor : float
        Threshold the pivot was compared against.
    """

    def __init__(self, pivot, floor, column):
        self.pivot = pivot
        self.floor = floor
        self.column = column
        super().__init__(
            f"matrix is singular to working tolerance: pivot |{pivot:.3e}| "
            f"< floor {floor:.3e} at column {column}"
        )


def as_complex_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D complex128 array.

    Scalars and 1-D inputs are rejected; use ``reshape`` explicitly so that
    row/column vectors are never guessed.
    """
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return arr


def _require_square(a, op):
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{op} requires a square matrix, got shape {a.shape}")


def matmul(a, b):
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def hermitian(a):
    """Conjugate transpose."""
    return np.conj(np.asarray(a, dtype=np.complex128)).T


def trace(a):
    a = np.asarray(a, dtype=np.complex128)
    _require_square(a, "trace")
    return complex(np.trace(a))


def lu_factor(a):
    """LU factorization with partial pivoting, ``P a = L U``.

    Returns ``(lu, perm, sign, floor)`` where ``lu`` packs the unit lower
    factor below the diagonal and ``U`` on and above it, ``perm`` is the row
    permutation and ``sign`` its parity. Zero pivots are left in place; the
    caller decides whether they are fatal.
    """
    lu = np.array(a, dtype=np.complex128, copy=True)
    _require_square(lu, "LU factorization")
    n = lu.shape[0]
    perm = np.arange(n)
    sign = 1
    floor = SINGULAR_RTOL * float(np.max(np.abs(lu)))
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
            sign = -sign
        pivot = lu[k, k]
        if pivot == 0:
            continue
        if k + 1 < n:
            lu[k + 1:, k] /= pivot
            lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    return lu, perm, sign, floor


def determinant(a):
    """Determinant via LU; exactly singular input gives ``0``."""
    lu, _, sign, _ = lu_factor(a)
    return complex(sign * np.prod(np.diag(lu)))


def inverse(a):
    """Inverse via LU forward/back substitution.

    Raises
    ------
    SingularMatrixError
        If any pivot magnitude is below ``SINGULAR_RTOL`` times the largest
        entry magnitude (an all-zero matrix always fails).
    """
    lu, perm, _, floor = lu_factor(a)
    n = lu.shape[0]
    for k in range(n):
        mag = abs(lu[k, k])
        if mag == 0 or mag < floor:
            raise SingularMatrixError(mag, floor, k)

    x = np.eye(n, dtype=np.complex128)[perm]
    for i in range(1, n):
        x[i] -= lu[i, :i] @ x[:i]
    for i in range(n - 1, -1, -1):
        x[i] -= lu[i, i + 1:] @ x[i + 1:]
        x[i] /= lu[i, i]
    return x


def vector_norm_sq(v):
    """Squared Euclidean norm of a complex vector."""
    v = np.asarray(v, dtype=np.complex128).ravel()
    return float(np.real(np.vdot(v, v)))
