"""
Pydantic schemas for quantum values, results and HTTP bodies.
"""

from app.schemas.api import (
    CheckRequest,
    ComputeRequest,
    ComputeResponse,
    FuzzRequest,
    FuzzResponse,
    ParseRequest,
    ParseResponse,
)
from app.schemas.quantum import (
    INFINITE,
    NEG_INFINITE,
    BlochVector,
    ChoiMatrix,
    CPVerdict,
    DensityMatrix,
    Ensemble,
    ErasureDecomposition,
    ExtendedReal,
    Infinite,
    KrausChannel,
    PurifiedState,
    is_infinite,
)
from app.schemas.reports import (
    ChannelConstant,
    CoherentInfoResult,
    FuzzSettings,
    FuzzSummary,
    InequalityReport,
    OptimizerMethod,
    OptimizerSettings,
    RelativeEntropyIdentity,
    SpectrumInterval,
    StratumCounts,
    SweepRow,
    WeylBound,
)

__all__ = [
    "INFINITE",
    "NEG_INFINITE",
    "BlochVector",
    "ChannelConstant",
    "CheckRequest",
    "ChoiMatrix",
    "CoherentInfoResult",
    "ComputeRequest",
    "ComputeResponse",
    "CPVerdict",
    "DensityMatrix",
    "Ensemble",
    "ErasureDecomposition",
    "ExtendedReal",
    "FuzzRequest",
    "FuzzResponse",
    "FuzzSettings",
    "FuzzSummary",
    "InequalityReport",
    "Infinite",
    "KrausChannel",
    "OptimizerMethod",
    "OptimizerSettings",
    "ParseRequest",
    "ParseResponse",
    "PurifiedState",
    "RelativeEntropyIdentity",
    "SpectrumInterval",
    "StratumCounts",
    "SweepRow",
    "WeylBound",
    "is_infinite",
]
