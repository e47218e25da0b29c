"""
Dense complex matrix algebra and Hermitian spectral routines.

Matrices are ``complex128`` numpy arrays. Every function returns a fresh,
read-only array so values can be shared freely once constructed.
"""

from enum import Enum
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import settings
from app.errors import DimensionError, InvalidInputError, NegativityError, NotHermitianError

ComplexMatrix = np.ndarray

MatrixLike = Union[np.ndarray, Sequence[Sequence[complex]]]


class Subsystem(str, Enum):
    """Factor of a bipartite space ``first ⊗ second``."""

    FIRST = "first"
    SECOND = "second"


class HermitianEigen(NamedTuple):
    """Spectrum in ascending order with eigenvectors as columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def frozen(a: np.ndarray) -> np.ndarray:
    """Mark an array read-only and return it."""
    a.flags.writeable = False
    return a


def as_matrix(entries: MatrixLike) -> ComplexMatrix:
    """
    Build a validated complex matrix.

    Args:
        entries: 2-D array-like of complex numbers

    Returns:
        Read-only ``complex128`` array
    """
    m = np.array(entries, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix entries must be finite")
    return frozen(m)


def identity(d: int) -> ComplexMatrix:
    return frozen(np.eye(d, dtype=np.complex128))


def outer(u: np.ndarray, v: np.ndarray) -> ComplexMatrix:
    """|u><v|"""
    return frozen(np.outer(u, np.conj(v)))


def frobenius_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, "fro"))


def multiply(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape[0]}x{a.shape[1]} by {b.shape[0]}x{b.shape[1]}")
    return frozen(a @ b)


def adjoint(a: ComplexMatrix) -> ComplexMatrix:
    return frozen(np.conj(a).T.copy())


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    return frozen(np.kron(a, b))


def partial_trace(m: ComplexMatrix, dims: Tuple[int, int], which: Subsystem) -> ComplexMatrix:
    """
    Trace out one factor of a bipartite operator.

    Args:
        m: square matrix on ``first ⊗ second`` with side ``dims[0] * dims[1]``
        dims: (dimension of first factor, dimension of second factor)
        which: the factor to trace out

    Returns:
        Reduced matrix over the kept factor
    """
    d1, d2 = dims
    if d1 < 1 or d2 < 1:
        raise DimensionError(f"subsystem dimensions must be positive, got {dims}")
    if m.shape != (d1 * d2, d1 * d2):
        raise DimensionError(f"matrix of shape {m.shape} does not act on a {d1}x{d2} bipartite space")
    t = m.reshape(d1, d2, d1, d2)
    if Subsystem(which) is Subsystem.FIRST:
        reduced = np.einsum("ijik->jk", t)
    else:
        reduced = np.einsum("ijkj->ik", t)
    return frozen(np.ascontiguousarray(reduced))


def hermitian_deviation(a: ComplexMatrix) -> float:
    return frobenius_norm(a - np.conj(a).T)


def symmetrize(a: ComplexMatrix) -> ComplexMatrix:
    return frozen((a + np.conj(a).T) / 2.0)


def check_hermitian(a: ComplexMatrix, tol: Optional[float] = None) -> None:
    """Raise NotHermitianError unless ||a - a^dag||_F <= tol * (1 + ||a||_F)."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    tol = settings.hermitian_tol if tol is None else tol
    bound = tol * (1.0 + frobenius_norm(a))
    deviation = hermitian_deviation(a)
    if deviation > bound:
        raise NotHermitianError(deviation, bound)


def hermitian_eig(a: ComplexMatrix, tol: Optional[float] = None) -> HermitianEigen:
    """
    Eigendecomposition of a Hermitian matrix.

    The input is symmetrized as (a + a^dag)/2 before solving.

    Returns:
        HermitianEigen with eigenvalues ascending
    """
    check_hermitian(a, tol)
    values, vectors = np.linalg.eigh(symmetrize(a))
    return HermitianEigen(frozen(values), frozen(vectors))


def eigvalsh(a: ComplexMatrix, tol: Optional[float] = None) -> np.ndarray:
    """Ascending spectrum of a Hermitian matrix."""
    check_hermitian(a, tol)
    return frozen(np.linalg.eigvalsh(symmetrize(a)))


def lambda_min(a: ComplexMatrix) -> float:
    return float(eigvalsh(a)[0])


def check_psd(eigenvalues: np.ndarray, scale: float, tol: Optional[float] = None) -> None:
    tol = settings.hermitian_tol if tol is None else tol
    bound = tol * (1.0 + scale)
    smallest = float(eigenvalues[0])
    if smallest < -bound:
        raise NegativityError(smallest, bound)


def log_on_support(a: ComplexMatrix, cutoff: Optional[float] = None) -> ComplexMatrix:
    """
    Base-2 matrix logarithm restricted to the support of a PSD matrix.

    Eigenvalues at or below ``cutoff`` map to 0.

    Args:
        a: Hermitian positive semidefinite matrix
        cutoff: support threshold on eigenvalues

    Returns:
        V diag(log2 l_i for l_i > cutoff, else 0) V^dag
    """
    cutoff = settings.support_cutoff if cutoff is None else cutoff
    values, vectors = hermitian_eig(a)
    check_psd(values, frobenius_norm(a))
    logs = np.zeros_like(values)
    support = values > cutoff
    logs[support] = np.log2(values[support])
    return frozen((vectors * logs) @ np.conj(vectors).T)


def support_projector(a: ComplexMatrix, cutoff: Optional[float] = None) -> ComplexMatrix:
    """Orthogonal projector onto the eigenvectors of ``a`` above ``cutoff``."""
    cutoff = settings.support_cutoff if cutoff is None else cutoff
    values, vectors = hermitian_eig(a)
    kept = vectors[:, values > cutoff]
    return frozen(kept @ np.conj(kept).T)


SIGMA_X = frozen(np.array([[0, 1], [1, 0]], dtype=np.complex128))
SIGMA_Y = frozen(np.array([[0, -1j], [1j, 0]], dtype=np.complex128))
SIGMA_Z = frozen(np.array([[1, 0], [0, -1]], dtype=np.complex128))
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)
