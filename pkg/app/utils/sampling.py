"""
Seeded random instances: Haar vectors and unitaries, isometries, states,
ensembles and Hermitian matrices.

Every generator takes a numpy Generator; ``rng_for(seed, index)`` derives the
per-instance generator so trial ``index`` of a campaign can be regenerated on
its own.
"""

from typing import Optional

import numpy as np

from app.utils.linalg import frozen


def rng_for(seed: int, index: int = 0) -> np.random.Generator:
    """PCG64 generator for instance ``index`` of a campaign seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(seed + index))


def complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard complex normal samples (unit variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """
    Haar-distributed isometry V (V^dag V = I) of shape rows x cols.

    QR of a complex Ginibre matrix with the phases of R's diagonal folded into Q.
    """
    q, r = np.linalg.qr(complex_normal(rng, (rows, cols)))
    diag = np.diag(r)
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return frozen(q * phases)


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    return haar_isometry(rng, d, d)


def haar_vector(rng: np.random.Generator, d: int) -> np.ndarray:
    v = complex_normal(rng, d)
    return frozen(v / np.linalg.norm(v))


def random_density(rng: np.random.Generator, d: int, rank: Optional[int] = None) -> np.ndarray:
    """Density matrix G G^dag / tr(G G^dag) with G a d x rank Ginibre matrix."""
    g = complex_normal(rng, (d, rank or d))
    m = g @ np.conj(g).T
    m = (m + np.conj(m).T) / 2.0
    return frozen(m / np.trace(m).real)


def random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = complex_normal(rng, (d, d))
    return frozen((g + np.conj(g).T) / 2.0)


def random_simplex(rng: np.random.Generator, n: int) -> np.ndarray:
    """Flat (uniform) sample from the probability simplex."""
    p = rng.dirichlet(np.ones(n))
    return frozen(p / p.sum())
