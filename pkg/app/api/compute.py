"""
Compute API endpoint - single quantities.
POST /compute/{quantity} - entropy, relent, coherent or cconst.
"""

import structlog
from fastapi import APIRouter, HTTPException

from app.errors import QDPIError
from app.schemas import ComputeRequest, ComputeResponse
from app.schemas.quantum import is_infinite
from app.services import compute_service, expression_service
from app.utils import formats

logger = structlog.get_logger()
router = APIRouter()


@router.post("/compute/{quantity}", response_model=ComputeResponse)
def compute_quantity(quantity: str, request: ComputeRequest):
    """
    Compute one quantity in bits.

    States and ensembles are built-in names or JSON file paths; the channel
    is a channel expression. An infinite relative entropy comes back as
    value=null with infinite=true.
    """
    try:
        value, details = compute_service.compute(
            quantity,
            state=formats.resolve_state(request.state) if request.state else None,
            state2=formats.resolve_state(request.state2) if request.state2 else None,
            ensemble=formats.resolve_ensemble(request.ensemble) if request.ensemble else None,
            channel=expression_service.channel_from_text(request.channel) if request.channel else None,
        )
        logger.info("Quantity computed", quantity=quantity)
        if is_infinite(value):
            return ComputeResponse(quantity=quantity, value=None, infinite=True, details=details)
        return ComputeResponse(quantity=quantity, value=value, details=details)

    except QDPIError:
        raise
    except Exception as e:
        logger.error("Error computing quantity", quantity=quantity, error=str(e))
        raise HTTPException(status_code=500, detail=f"Failed to compute {quantity}: {str(e)}")
