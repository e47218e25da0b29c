"""
State Service - density matrices, ensembles, purification and entropies.
All entropies are in bits.
"""

from typing import Optional, Sequence, Union

import numpy as np
import structlog

from app.config import settings
from app.errors import DimensionError
from app.schemas.quantum import INFINITE, BlochVector, DensityMatrix, Ensemble, ExtendedReal, PurifiedState
from app.utils import linalg

logger = structlog.get_logger()


class StateService:
    """Constructors and entropy functionals for quantum states."""

    @classmethod
    def ensemble_to_density(cls, e: Ensemble) -> DensityMatrix:
        """rho = sum_i p_i |psi_i><psi_i|"""
        probs = np.asarray(e.probs)
        rho = e.states.T @ (probs[:, None] * np.conj(e.states))
        return DensityMatrix(mat=rho)

    @classmethod
    def purify(cls, e: Ensemble) -> PurifiedState:
        """
        Purification sum_i sqrt(p_i) |i>_R ⊗ |psi_i> with the computational
        basis of an n-dimensional reference space.
        """
        amplitudes = np.sqrt(np.asarray(e.probs))[:, None] * e.states
        return PurifiedState(vector=amplitudes.reshape(-1), ref_dim=e.size, sys_dim=e.dim)

    @classmethod
    def reference_state(cls, e: Ensemble) -> DensityMatrix:
        """
        Reference-side reduction rho^R with entries sqrt(p_i p_j) <psi_j|psi_i>.

        The overlap order <psi_j|psi_i> is the one that makes rho^R equal the
        partial trace of |psi^R><psi^R| over the system.
        """
        root = np.sqrt(np.asarray(e.probs))
        gram = e.states @ np.conj(e.states).T
        return DensityMatrix(mat=root[:, None] * gram * root[None, :])

    @classmethod
    def von_neumann_entropy(cls, rho: DensityMatrix, cutoff: Optional[float] = None) -> float:
        """-sum_i l_i log2 l_i over eigenvalues above the support cutoff."""
        cutoff = settings.support_cutoff if cutoff is None else cutoff
        values = linalg.eigvalsh(rho.mat)
        support = values[values > cutoff]
        entropy = float(-np.sum(support * np.log2(support)))
        return max(entropy, 0.0)

    @classmethod
    def relative_entropy(cls, r1: DensityMatrix, r2: DensityMatrix) -> ExtendedReal:
        """
        Umegaki relative entropy S(r1 || r2) = tr(r1 log r1 - r1 log r2).

        Returns:
            Finite value when supp(r1) ⊆ supp(r2), INFINITE when r1 puts
            weight above the state tolerance outside supp(r2)
        """
        if r1.dim != r2.dim:
            raise DimensionError(f"relative entropy of a {r1.dim}-dim state against a {r2.dim}-dim state")

        kernel = np.eye(r2.dim) - linalg.support_projector(r2.mat)
        leaked = float(np.real(np.trace(kernel @ r1.mat)))
        if leaked > settings.state_tol:
            logger.debug("Relative entropy diverges", leaked_weight=leaked)
            return INFINITE

        log_r1 = linalg.log_on_support(r1.mat)
        log_r2 = linalg.log_on_support(r2.mat)
        return float(np.real(np.trace(r1.mat @ (log_r1 - log_r2))))

    @classmethod
    def bloch_to_density(cls, a: Union[BlochVector, Sequence[float]]) -> DensityMatrix:
        """rho = (1 + a.sigma)/2"""
        vector = a if isinstance(a, BlochVector) else BlochVector(a=tuple(a))
        mat = np.eye(2, dtype=np.complex128)
        for component, pauli in zip(vector.a, linalg.PAULIS):
            mat = mat + component * pauli
        return DensityMatrix(mat=mat / 2.0)

    @classmethod
    def density_to_bloch(cls, rho: DensityMatrix) -> BlochVector:
        """a_i = tr(rho sigma_i)"""
        if rho.dim != 2:
            raise DimensionError(f"Bloch vectors describe qubits only, got dimension {rho.dim}")
        components = tuple(float(np.real(np.trace(rho.mat @ pauli))) for pauli in linalg.PAULIS)
        length = float(np.linalg.norm(components))
        if length > 1.0:
            components = tuple(c / length for c in components)
        return BlochVector(a=components)

    @classmethod
    def spectral_ensemble(cls, rho: DensityMatrix, cutoff: Optional[float] = None) -> Ensemble:
        """Ensemble of eigenvectors weighted by the eigenvalues above the support cutoff."""
        cutoff = settings.support_cutoff if cutoff is None else cutoff
        eigen = linalg.hermitian_eig(rho.mat)
        keep = eigen.eigenvalues > cutoff
        probs = eigen.eigenvalues[keep] / eigen.eigenvalues[keep].sum()
        return Ensemble(probs=tuple(float(p) for p in probs), states=eigen.eigenvectors[:, keep].T)

    @classmethod
    def pure_state(cls, vector: Sequence[complex]) -> DensityMatrix:
        v = np.asarray(vector, dtype=np.complex128)
        return DensityMatrix(mat=linalg.outer(v, v))

    @classmethod
    def maximally_mixed(cls, d: int) -> DensityMatrix:
        return DensityMatrix(mat=np.eye(d) / d)


def binary_entropy(p: float) -> float:
    """h2(p) in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1.0 - p) * np.log2(1.0 - p))


# Convenience functions
ensemble_to_density = StateService.ensemble_to_density
purify = StateService.purify
reference_state = StateService.reference_state
von_neumann_entropy = StateService.von_neumann_entropy
relative_entropy = StateService.relative_entropy
bloch_to_density = StateService.bloch_to_density
density_to_bloch = StateService.density_to_bloch
pure_state = StateService.pure_state
maximally_mixed = StateService.maximally_mixed
spectral_ensemble = StateService.spectral_ensemble
