"""
Immutable quantum value types: states, ensembles, purifications, channels.

Each model validates its physical invariants on construction. Invariant
violations raise the toolkit's own exceptions (they are not ValueErrors, so
pydantic lets them through unchanged).
"""

from typing import Annotated, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PlainSerializer, ValidationInfo, field_validator, model_validator

from app.config import settings
from app.errors import DimensionError, InvalidInputError
from app.utils import linalg


def _context_tol(info: ValidationInfo, default: float) -> float:
    context = info.context or {}
    return float(context.get("tol", default))


class Infinite(BaseModel):
    """Signed infinity for extended-real results such as relative entropies."""

    model_config = ConfigDict(frozen=True)

    sign: int = 1

    def __str__(self) -> str:
        return "inf" if self.sign > 0 else "-inf"

    def __neg__(self) -> "Infinite":
        return Infinite(sign=-self.sign)


INFINITE = Infinite()
NEG_INFINITE = Infinite(sign=-1)


def _serialize_extended(value: Union[float, Infinite]) -> Union[float, str]:
    return str(value) if isinstance(value, Infinite) else float(value)


ExtendedReal = Annotated[Union[float, Infinite], PlainSerializer(_serialize_extended)]


def is_infinite(value: object) -> bool:
    return isinstance(value, Infinite)


class _Frozen(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)


class DensityMatrix(_Frozen):
    """Hermitian, unit-trace, positive semidefinite operator."""

    mat: np.ndarray

    @field_validator("mat", mode="before")
    @classmethod
    def _coerce(cls, value):
        return linalg.as_matrix(value)

    @field_validator("mat")
    @classmethod
    def _check_state(cls, mat: np.ndarray, info: ValidationInfo) -> np.ndarray:
        tol = _context_tol(info, settings.state_tol)
        linalg.check_hermitian(mat, tol)
        mat = linalg.symmetrize(mat)
        trace = complex(np.trace(mat))
        if abs(trace - 1.0) > tol:
            raise InvalidInputError(f"density matrix trace is {trace.real:.12g}, expected 1")
        smallest = float(np.linalg.eigvalsh(mat)[0])
        if smallest < -tol:
            raise InvalidInputError(f"density matrix has negative eigenvalue {smallest:.3e}")
        return mat

    @classmethod
    def checked(cls, mat, tol: Optional[float] = None) -> "DensityMatrix":
        """Validate ``mat`` against an explicit tolerance."""
        return cls.model_validate({"mat": mat}, context={"tol": settings.state_tol if tol is None else tol})

    @property
    def dim(self) -> int:
        return int(self.mat.shape[0])


class Ensemble(_Frozen):
    """Probabilistic mixture {p_i, |psi_i>} of unit vectors, not necessarily orthogonal."""

    probs: Tuple[float, ...]
    states: np.ndarray

    @field_validator("states", mode="before")
    @classmethod
    def _coerce_states(cls, value):
        states = np.array(value, dtype=np.complex128)
        if states.ndim == 1:
            states = states.reshape(1, -1)
        if states.ndim != 2 or states.shape[1] == 0:
            raise DimensionError(f"ensemble states must be a list of equal-length vectors, got shape {states.shape}")
        if not np.all(np.isfinite(states)):
            raise InvalidInputError("ensemble state amplitudes must be finite")
        return linalg.frozen(states)

    @model_validator(mode="after")
    def _check_ensemble(self) -> "Ensemble":
        tol = settings.state_tol
        if len(self.probs) == 0:
            raise InvalidInputError("ensemble must contain at least one state")
        if len(self.probs) != self.states.shape[0]:
            raise DimensionError(f"{len(self.probs)} probabilities for {self.states.shape[0]} states")
        if any(p < 0 for p in self.probs):
            raise InvalidInputError(f"ensemble probabilities must be non-negative, got {self.probs}")
        if abs(sum(self.probs) - 1.0) > tol:
            raise InvalidInputError(f"ensemble probabilities sum to {sum(self.probs):.12g}, expected 1")
        norms = np.linalg.norm(self.states, axis=1)
        for index, norm in enumerate(norms):
            if abs(norm - 1.0) > tol:
                raise InvalidInputError(f"ensemble state {index} has norm {norm:.12g}, expected 1")
        return self

    @property
    def size(self) -> int:
        return len(self.probs)

    @property
    def dim(self) -> int:
        return int(self.states.shape[1])


class PurifiedState(_Frozen):
    """Unit vector on reference ⊗ system; the reference factor comes first."""

    vector: np.ndarray
    ref_dim: int = Field(..., ge=1)
    sys_dim: int = Field(..., ge=1)

    @field_validator("vector", mode="before")
    @classmethod
    def _coerce_vector(cls, value):
        return linalg.frozen(np.array(value, dtype=np.complex128).reshape(-1))

    @model_validator(mode="after")
    def _check_purification(self) -> "PurifiedState":
        if self.vector.shape[0] != self.ref_dim * self.sys_dim:
            raise DimensionError(
                f"vector of length {self.vector.shape[0]} does not live on a {self.ref_dim}x{self.sys_dim} space"
            )
        norm = float(np.linalg.norm(self.vector))
        if abs(norm - 1.0) > settings.state_tol:
            raise InvalidInputError(f"purification has norm {norm:.12g}, expected 1")
        return self

    @property
    def dims(self) -> Tuple[int, int]:
        return self.ref_dim, self.sys_dim

    def projector(self) -> np.ndarray:
        return linalg.outer(self.vector, self.vector)


class BlochVector(_Frozen):
    """Real 3-vector parametrising a qubit state as (1 + a.sigma)/2."""

    a: Tuple[float, float, float]

    @field_validator("a")
    @classmethod
    def _check_length(cls, a):
        length = float(np.linalg.norm(a))
        if not np.all(np.isfinite(a)) or length > 1.0 + settings.state_tol:
            raise InvalidInputError(f"Bloch vector length {length:.12g} exceeds 1")
        return a

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.a))


class KrausChannel(_Frozen):
    """CPTP map rho -> sum_mu A_mu rho A_mu^dag with sum_mu A_mu^dag A_mu = I."""

    ops: Tuple[np.ndarray, ...]
    dim_in: int = Field(..., ge=1)
    dim_out: int = Field(..., ge=1)
    tolerance: float = Field(default_factory=lambda: settings.completeness_tol)

    @field_validator("ops", mode="before")
    @classmethod
    def _coerce_ops(cls, value):
        return tuple(linalg.as_matrix(op) for op in value)

    @model_validator(mode="after")
    def _check_completeness(self) -> "KrausChannel":
        if not self.ops:
            raise InvalidInputError("a channel needs at least one Kraus operator")
        for index, op in enumerate(self.ops):
            if op.shape != (self.dim_out, self.dim_in):
                raise DimensionError(
                    f"Kraus operator {index} has shape {op.shape}, expected ({self.dim_out}, {self.dim_in})"
                )
        total = sum(np.conj(op).T @ op for op in self.ops)
        deviation = linalg.frobenius_norm(total - np.eye(self.dim_in))
        if deviation > self.tolerance:
            raise InvalidInputError(
                f"Kraus operators are not complete: ||sum A^dag A - I||_F = {deviation:.3e}"
            )
        return self

    @classmethod
    def from_ops(cls, ops, tolerance: Optional[float] = None) -> "KrausChannel":
        """Build a channel, reading its dimensions off the first operator."""
        matrices = tuple(linalg.as_matrix(op) for op in ops)
        if not matrices:
            raise InvalidInputError("a channel needs at least one Kraus operator")
        dim_out, dim_in = matrices[0].shape
        fields = {"ops": matrices, "dim_in": dim_in, "dim_out": dim_out}
        if tolerance is not None:
            fields["tolerance"] = tolerance
        return cls(**fields)

    @property
    def kraus_count(self) -> int:
        return len(self.ops)


class ChoiMatrix(_Frozen):
    """
    Unnormalised Choi matrix sum_ij |i><j| ⊗ S(|i><j|) on input ⊗ output.

    For a trace-preserving map the partial trace over the output is I_dIn.
    """

    mat: np.ndarray
    dim_in: int = Field(..., ge=1)
    dim_out: int = Field(..., ge=1)

    @field_validator("mat", mode="before")
    @classmethod
    def _coerce(cls, value):
        return linalg.as_matrix(value)

    @model_validator(mode="after")
    def _check_choi(self) -> "ChoiMatrix":
        side = self.dim_in * self.dim_out
        if self.mat.shape != (side, side):
            raise DimensionError(f"Choi matrix of shape {self.mat.shape} does not match {self.dim_in}x{self.dim_out}")
        linalg.check_hermitian(self.mat, settings.completeness_tol)
        return self


class CPVerdict(BaseModel):
    """Complete-positivity decision with the Choi spectrum's smallest eigenvalue."""

    is_cp: bool
    min_eigenvalue: float


class ErasureDecomposition(_Frozen):
    """S = c C1 + (1 - c) C2 with C1 the erasure channel onto |0><0|."""

    c: float
    choi: ChoiMatrix
    channel: Optional[KrausChannel] = None
    cp_verdict: bool
    min_eigenvalue: float
    residual: float
