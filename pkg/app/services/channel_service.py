"""
Channel Service - Kraus-represented quantum channels.

Convention: S(rho) = sum_mu A_mu rho A_mu^dag with sum_mu A_mu^dag A_mu = I.
Operators written in the adjoint convention (S rho = sum A^dag rho A,
sum A A^dag = I) map to this one by A_mu <-> A_mu^dag.
"""

from typing import Callable, List, Optional

import numpy as np
import structlog

from app.config import settings
from app.errors import ConsistencyError, DimensionError, InvalidInputError
from app.schemas.quantum import ChoiMatrix, CPVerdict, DensityMatrix, ErasureDecomposition, KrausChannel
from app.utils import linalg, sampling

logger = structlog.get_logger()

LinearMap = Callable[[np.ndarray], np.ndarray]


def _check_unit_interval(name: str, value: float) -> None:
    if not 0.0 <= value <= 1.0:
        raise InvalidInputError(f"{name} must lie in [0, 1], got {value}")


class ChannelService:
    """Construction, algebra and Choi-matrix tools for Kraus channels."""

    @classmethod
    def apply_operator(cls, s: KrausChannel, m: np.ndarray) -> np.ndarray:
        """Action of the Kraus set on an arbitrary dIn x dIn operator."""
        if m.shape != (s.dim_in, s.dim_in):
            raise DimensionError(f"channel expects {s.dim_in}x{s.dim_in} input, got {m.shape}")
        out = np.zeros((s.dim_out, s.dim_out), dtype=np.complex128)
        for op in s.ops:
            out += op @ m @ np.conj(op).T
        return linalg.frozen(out)

    @classmethod
    def apply(cls, s: KrausChannel, rho: DensityMatrix) -> DensityMatrix:
        """S(rho), validated as a density matrix at the channel's tolerance."""
        if rho.dim != s.dim_in:
            raise DimensionError(f"channel expects a {s.dim_in}-dim state, got dimension {rho.dim}")
        out = cls.apply_operator(s, rho.mat)
        return DensityMatrix.checked(out, max(s.tolerance, settings.state_tol))

    @classmethod
    def compose(cls, s2: KrausChannel, s1: KrausChannel) -> KrausChannel:
        """S2 ∘ S1 with Kraus set {B_nu A_mu}."""
        if s1.dim_out != s2.dim_in:
            raise DimensionError(
                f"cannot compose: inner channel outputs dimension {s1.dim_out}, outer expects {s2.dim_in}"
            )
        ops = [b @ a for b in s2.ops for a in s1.ops]
        return KrausChannel(
            ops=ops, dim_in=s1.dim_in, dim_out=s2.dim_out, tolerance=max(s1.tolerance, s2.tolerance)
        )

    @classmethod
    def mix(cls, c: float, s1: KrausChannel, s2: KrausChannel) -> KrausChannel:
        """c S1 + (1 - c) S2 with Kraus set {sqrt(c) A_mu} ∪ {sqrt(1 - c) B_nu}."""
        _check_unit_interval("mixing weight c", c)
        if (s1.dim_in, s1.dim_out) != (s2.dim_in, s2.dim_out):
            raise DimensionError(
                f"cannot mix a {s1.dim_in}->{s1.dim_out} channel with a {s2.dim_in}->{s2.dim_out} channel"
            )
        ops: List[np.ndarray] = []
        if c > 0.0:
            ops.extend(np.sqrt(c) * a for a in s1.ops)
        if c < 1.0:
            ops.extend(np.sqrt(1.0 - c) * b for b in s2.ops)
        return KrausChannel(
            ops=ops, dim_in=s1.dim_in, dim_out=s1.dim_out, tolerance=max(s1.tolerance, s2.tolerance)
        )

    @classmethod
    def extend_with_identity(cls, s: KrausChannel, ref_dim: int) -> KrausChannel:
        """1_R ⊗ S with Kraus set {I_R ⊗ A_mu}; the reference factor comes first."""
        if ref_dim < 1:
            raise DimensionError(f"reference dimension must be positive, got {ref_dim}")
        eye = np.eye(ref_dim, dtype=np.complex128)
        return KrausChannel(
            ops=[np.kron(eye, a) for a in s.ops],
            dim_in=ref_dim * s.dim_in,
            dim_out=ref_dim * s.dim_out,
            tolerance=s.tolerance,
        )

    @classmethod
    def choi_from_map(cls, fn: LinearMap, dim_in: int, dim_out: int) -> ChoiMatrix:
        """Choi matrix sum_ij |i><j| ⊗ fn(|i><j|) of an arbitrary linear map."""
        mat = np.zeros((dim_in * dim_out, dim_in * dim_out), dtype=np.complex128)
        for i in range(dim_in):
            for j in range(dim_in):
                unit = np.zeros((dim_in, dim_in), dtype=np.complex128)
                unit[i, j] = 1.0
                block = np.asarray(fn(unit))
                mat[i * dim_out:(i + 1) * dim_out, j * dim_out:(j + 1) * dim_out] = block
        return ChoiMatrix(mat=mat, dim_in=dim_in, dim_out=dim_out)

    @classmethod
    def choi(cls, s: KrausChannel) -> ChoiMatrix:
        """
        Choi matrix (1 ⊗ S)(|Omega><Omega|) with the unnormalised maximally
        entangled vector |Omega> = sum_i |i>|i>.
        """
        omega = np.eye(s.dim_in, dtype=np.complex128).reshape(-1)
        extended = cls.extend_with_identity(s, s.dim_in)
        mat = cls.apply_operator(extended, np.outer(omega, omega))
        return ChoiMatrix(mat=mat, dim_in=s.dim_in, dim_out=s.dim_out)

    @classmethod
    def is_cp(cls, ch: ChoiMatrix, tol: Optional[float] = None) -> CPVerdict:
        """Completely positive iff the Choi matrix's smallest eigenvalue is >= -tol."""
        tol = settings.cp_tol if tol is None else tol
        smallest = float(linalg.eigvalsh(ch.mat, settings.completeness_tol)[0])
        return CPVerdict(is_cp=smallest >= -tol, min_eigenvalue=smallest)

    @classmethod
    def apply_choi(cls, ch: ChoiMatrix, m: np.ndarray) -> np.ndarray:
        """S(m) = sum_ij m_ij S(|i><j|) read off the Choi blocks."""
        if m.shape != (ch.dim_in, ch.dim_in):
            raise DimensionError(f"map expects {ch.dim_in}x{ch.dim_in} input, got {m.shape}")
        blocks = ch.mat.reshape(ch.dim_in, ch.dim_out, ch.dim_in, ch.dim_out)
        return linalg.frozen(np.einsum("ij,iajb->ab", m, blocks))

    @classmethod
    def kraus_from_choi(
        cls, ch: ChoiMatrix, cutoff: Optional[float] = None, tolerance: Optional[float] = None
    ) -> KrausChannel:
        """
        Kraus set from the Choi eigendecomposition: eigenpairs above ``cutoff``,
        eigenvectors scaled by sqrt(eigenvalue) and reshaped.
        """
        cutoff = settings.kraus_recovery_cutoff if cutoff is None else cutoff
        values, vectors = linalg.hermitian_eig(ch.mat, settings.completeness_tol)
        ops = [
            np.sqrt(value) * vectors[:, k].reshape(ch.dim_in, ch.dim_out).T
            for k, value in enumerate(values)
            if value > cutoff
        ]
        if not ops:
            raise InvalidInputError("Choi matrix has no eigenvalue above the recovery cutoff")
        return KrausChannel(
            ops=ops,
            dim_in=ch.dim_in,
            dim_out=ch.dim_out,
            tolerance=settings.cp_tol if tolerance is None else tolerance,
        )

    @classmethod
    def identity_channel(cls, d: int) -> KrausChannel:
        if d < 1:
            raise InvalidInputError(f"dimension must be positive, got {d}")
        return KrausChannel(ops=[np.eye(d)], dim_in=d, dim_out=d)

    @classmethod
    def two_pauli(cls, x: float) -> KrausChannel:
        """
        Two-Pauli qubit channel A1 = sqrt(x) 1, A2 = sqrt((1-x)/2) sigma_1,
        A3 = -i sqrt((1-x)/2) sigma_2, stored as adjoints for the standard
        convention. Bloch action: (a1, a2, a3) -> (a1 x, a2 x, a3 (2x - 1)).
        """
        _check_unit_interval("two-Pauli parameter x", x)
        weight = np.sqrt((1.0 - x) / 2.0)
        written = [
            np.sqrt(x) * np.eye(2, dtype=np.complex128),
            weight * linalg.SIGMA_X,
            -1j * weight * linalg.SIGMA_Y,
        ]
        return KrausChannel(ops=[np.conj(a).T for a in written], dim_in=2, dim_out=2)

    @classmethod
    def erasure_channel(cls, d: int) -> KrausChannel:
        """Constant channel rho -> |0><0| with Kraus set {|0><mu|}."""
        if d < 1:
            raise InvalidInputError(f"dimension must be positive, got {d}")
        ops = []
        for mu in range(d):
            op = np.zeros((d, d), dtype=np.complex128)
            op[0, mu] = 1.0
            ops.append(op)
        return KrausChannel(ops=ops, dim_in=d, dim_out=d)

    @classmethod
    def random_channel(cls, dim_in: int, dim_out: int, kraus_count: int, seed: int) -> KrausChannel:
        """
        Kraus blocks sliced from a Haar isometry of shape
        (kraus_count * dim_out) x dim_in. Deterministic for a fixed seed.
        """
        if min(dim_in, dim_out, kraus_count) < 1:
            raise InvalidInputError("dimensions and Kraus count must be positive")
        if kraus_count * dim_out < dim_in:
            raise InvalidInputError(
                f"{kraus_count} Kraus operators of output dimension {dim_out} cannot be complete on dimension {dim_in}"
            )
        isometry = sampling.haar_isometry(sampling.rng_for(seed), kraus_count * dim_out, dim_in)
        ops = [isometry[k * dim_out:(k + 1) * dim_out, :] for k in range(kraus_count)]
        return KrausChannel(ops=ops, dim_in=dim_in, dim_out=dim_out)

    @classmethod
    def decompose_erasure(cls, s: KrausChannel, c: float) -> ErasureDecomposition:
        """
        Split S = c C1 + (1 - c) C2 with C1 the erasure channel onto |0><0|.

        C2 rho = (S rho - c tr(rho) |0><0|) / (1 - c) is built through its Choi
        matrix; a Kraus set is recovered only when the Choi matrix is PSD.

        Args:
            s: channel with equal input and output dimension
            c: erasure weight in [0, 1)

        Returns:
            ErasureDecomposition with cp verdict and reconstruction residual
        """
        if s.dim_in != s.dim_out:
            raise DimensionError(f"erasure decomposition needs a square channel, got {s.dim_in}->{s.dim_out}")
        if not 0.0 <= c < 1.0:
            raise InvalidInputError(f"erasure weight c must lie in [0, 1), got {c}")

        d = s.dim_in
        choi_s = cls.choi(s)
        choi_erase = cls.choi(cls.erasure_channel(d))
        c2_choi = ChoiMatrix(mat=(choi_s.mat - c * choi_erase.mat) / (1.0 - c), dim_in=d, dim_out=d)

        residual = 0.0
        for i in range(d):
            for j in range(d):
                unit = np.zeros((d, d), dtype=np.complex128)
                unit[i, j] = 1.0
                rebuilt = c * cls.apply_choi(choi_erase, unit) + (1.0 - c) * cls.apply_choi(c2_choi, unit)
                residual = max(residual, linalg.frobenius_norm(rebuilt - cls.apply_operator(s, unit)))
        if residual > 1e-8:
            logger.error("Erasure decomposition does not reconstruct the channel", residual=residual)
            raise ConsistencyError(f"erasure decomposition residual {residual:.3e} exceeds 1e-8")

        verdict = cls.is_cp(c2_choi)
        channel = None
        if verdict.is_cp:
            try:
                channel = cls.kraus_from_choi(c2_choi)
            except InvalidInputError as e:
                logger.warning("Recovered Kraus set for C2 is not complete", error=str(e))

        logger.debug("Erasure decomposition", c=c, cp=verdict.is_cp, min_eigenvalue=verdict.min_eigenvalue)
        return ErasureDecomposition(
            c=c,
            choi=c2_choi,
            channel=channel,
            cp_verdict=verdict.is_cp,
            min_eigenvalue=verdict.min_eigenvalue,
            residual=residual,
        )


# Convenience functions
apply = ChannelService.apply
apply_operator = ChannelService.apply_operator
compose = ChannelService.compose
mix = ChannelService.mix
extend_with_identity = ChannelService.extend_with_identity
choi = ChannelService.choi
choi_from_map = ChannelService.choi_from_map
is_cp = ChannelService.is_cp
apply_choi = ChannelService.apply_choi
kraus_from_choi = ChannelService.kraus_from_choi
identity_channel = ChannelService.identity_channel
two_pauli = ChannelService.two_pauli
erasure_channel = ChannelService.erasure_channel
random_channel = ChannelService.random_channel
decompose_erasure = ChannelService.decompose_erasure
