"""
Request/response bodies for the HTTP service.
States, ensembles and channels are referenced the same way as on the CLI:
built-in names, JSON file paths, or channel expressions.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from app.schemas.reports import FuzzSettings, FuzzSummary, InequalityReport

MAX_HTTP_TRIALS = 10_000


class ComputeRequest(BaseModel):
    """Inputs for a single quantity computation."""
    state: Optional[str] = Field(None, description="State name (mixed2, pure0) or state JSON path")
    state2: Optional[str] = Field(None, description="Second state for relative entropy")
    ensemble: Optional[str] = Field(None, description="Ensemble name (mm2) or ensemble JSON path")
    channel: Optional[str] = Field(None, description="Channel expression, e.g. twopauli(0.7)")


class ComputeResponse(BaseModel):
    quantity: str
    value: Optional[float] = Field(None, description="Numeric value; null when infinite")
    infinite: bool = False
    details: Dict[str, Any] = Field(default_factory=dict)


class CheckRequest(BaseModel):
    """Inputs for a single inequality check; only the fields the check needs are read."""
    channel: Optional[str] = None
    channel1: Optional[str] = None
    channel2: Optional[str] = None
    state1: Optional[str] = None
    state2: Optional[str] = None
    sigma1: Optional[str] = None
    sigma2: Optional[str] = None
    ensemble: Optional[str] = None
    c: Optional[float] = Field(None, ge=0.0, le=1.0, description="Mixing weight")
    tol: Optional[float] = Field(None, gt=0.0)


class FuzzRequest(FuzzSettings):
    """Fuzz campaign over HTTP; the trial count is capped per request."""
    trials: int = Field(100, ge=1, le=MAX_HTTP_TRIALS)


class FuzzResponse(BaseModel):
    summary: FuzzSummary
    reports: List[InequalityReport]


class ParseRequest(BaseModel):
    expression: str = Field(..., min_length=1)


class ParseResponse(BaseModel):
    canonical: str
    dim_in: int
    dim_out: int
