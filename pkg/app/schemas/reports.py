"""
Result and report models produced by the information measures and the
inequality checkers.
"""

from typing import Any, Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.config import settings
from app.schemas.quantum import ExtendedReal


class CoherentInfoResult(BaseModel):
    """I(rho; S) = S(S rho) - S((1 ⊗ S)(|psi^R><psi^R|)), all in bits."""

    mutual_info: float = Field(..., description="Coherent information (may be negative)")
    output_entropy: float = Field(..., description="Entropy of the channel output")
    entropy_exchange: float = Field(..., description="Entropy of the evolved purification")


class OptimizerSettings(BaseModel):
    """Budget for the c(S) search; defaults come from the environment settings."""

    grid_points: int = Field(default_factory=lambda: settings.grid_points, ge=1)
    random_starts: int = Field(default_factory=lambda: settings.random_starts, ge=1)
    refine_starts: int = Field(default_factory=lambda: settings.refine_starts, ge=1)
    coordinate_iterations: int = Field(default_factory=lambda: settings.coordinate_iterations, ge=0)
    refinement_rounds: int = Field(default_factory=lambda: settings.refinement_rounds, ge=0)
    seed: int = Field(default_factory=lambda: settings.default_seed)


class OptimizerMethod(BaseModel):
    """Self-description of how a ChannelConstant was obtained."""

    strategy: Literal["fibonacci-golden", "random-coordinate", "trivial"]
    budget: OptimizerSettings
    evaluations: int


class ChannelConstant(BaseModel):
    """c(S): minimum over inputs of the smallest output eigenvalue, with a pure-state witness."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    value: float = Field(..., ge=0.0)
    witness: np.ndarray = Field(..., description="Unit input vector attaining the value")
    method: OptimizerMethod


class RelativeEntropyIdentity(BaseModel):
    """Both sides of S((1⊗S)(psi^R) || rho^R ⊗ S rho) = -S_e + S(rho^R) + S(S rho)."""

    lhs: ExtendedReal
    rhs: float
    difference: Optional[float] = None


class WeylBound(BaseModel):
    """Eigenvalue c_k of A + B against its Weyl interval (k is 1-based)."""

    k: int
    lower: float
    upper: float
    value: float
    violated: bool


class SpectrumInterval(BaseModel):
    """Interval for sigma_k (1 - c) given the spectrum of rho' = c|0><0| + (1 - c) sigma."""

    k: int
    lower: float
    upper: float


class InequalityReport(BaseModel):
    """One checked inequality instance. slack >= -tolerance means satisfied."""

    name: str
    lhs: ExtendedReal
    rhs: ExtendedReal
    slack: Optional[ExtendedReal] = None
    satisfied: bool
    indeterminate: bool = False
    tolerance: float
    instance: Dict[str, Any] = Field(default_factory=dict)
    auxiliary: Dict[str, Any] = Field(default_factory=dict)


class FuzzSettings(BaseModel):
    """Fuzz campaign definition."""

    inequality: str
    trials: int = Field(100, ge=1)
    dims: Tuple[int, ...] = (2,)
    seed: int = Field(default_factory=lambda: settings.default_seed)
    tol: Optional[float] = None


class StratumCounts(BaseModel):
    trials: int = 0
    violations: int = 0


class FuzzSummary(BaseModel):
    """Aggregate of a fuzz campaign."""

    inequality: str
    trials: int
    violations: int
    indeterminate: int = 0
    worst_slack: Optional[ExtendedReal] = None
    slack_quantiles: Dict[str, float] = Field(default_factory=dict)
    violating_seeds: List[int] = Field(default_factory=list)
    strata: Dict[str, StratumCounts] = Field(default_factory=dict)


class SweepRow(BaseModel):
    """One x of the two-Pauli c(S) sweep."""

    x: float
    c_numeric: float
    c_eq27: float
    c_bloch: float
    abs_diff: float
    agrees: bool
