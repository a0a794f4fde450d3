"""Dense complex matrix kernel used by every other module.

Matrices are plain ``numpy.ndarray`` values with ``complex128`` entries.
``as_matrix`` validates once and marks the array read-only; everything
else is a pure function on already-validated arrays.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, ShapeError

HERMITIAN_RTOL = 1e-9
RANK_RTOL = 1e-8


def as_matrix(values) -> np.ndarray:
    """Coerce ``values`` to a read-only 2-D complex128 matrix.

    Rejects empty shapes and non-finite entries.
    """
    mat = np.array(values, dtype=np.complex128, order="C")
    if mat.ndim != 2 or mat.shape[0] < 1 or mat.shape[1] < 1:
        raise ShapeError(f"expected a non-empty 2-D matrix, got shape {mat.shape}")
    if not np.isfinite(mat).all():
        raise DomainError("matrix entries must be finite")
    mat.flags.writeable = False
    return mat


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def adjoint(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.asarray(a).conj().T


def trace(a: np.ndarray) -> complex:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"trace needs a square matrix, got shape {a.shape}")
    return complex(np.trace(a))


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a), np.asarray(b))


def partial_trace_second(a: np.ndarray, dim1: int, dim2: int) -> np.ndarray:
    """Trace out the second tensor factor of a (dim1*dim2)-square matrix."""
    a = np.asarray(a)
    n = dim1 * dim2
    if dim1 < 1 or dim2 < 1:
        raise ShapeError("factor dimensions must be positive")
    if a.shape != (n, n):
        raise ShapeError(f"expected shape {(n, n)}, got {a.shape}")
    return np.einsum("ikjk->ij", a.reshape(dim1, dim2, dim1, dim2))


def frobenius(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a)))


def hermitize(a: np.ndarray) -> np.ndarray:
    """Hermitian part (a + a†)/2."""
    a = np.asarray(a)
    return (a + a.conj().T) / 2


def is_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    # relative to the matrix scale, with an absolute floor for tiny matrices
    scale = max(frobenius(a), 1.0)
    return frobenius(a - a.conj().T) <= rtol * scale


def hermitian_eigenvalues(a: np.ndarray) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, ascending.

    The input is symmetrized before factorization so that roundoff in the
    off-Hermitian part cannot leak imaginary parts into the spectrum.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {a.shape}")
    if not is_hermitian(a):
        raise DomainError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(hermitize(a))


def numeric_rank(a: np.ndarray, rel_tol: float = RANK_RTOL) -> int:
    """Number of singular values above ``rel_tol`` times the largest one."""
    if rel_tol <= 0:
        raise DomainError("rel_tol must be positive")
    s = np.linalg.svd(np.asarray(a, dtype=np.complex128), compute_uv=False)
    if s.size == 0 or s[0] <= 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))
