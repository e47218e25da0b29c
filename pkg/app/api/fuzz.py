"""
Fuzz API endpoint - seeded campaigns.
POST /fuzz - run a campaign and return its summary with every report.
"""

import structlog
from fastapi import APIRouter, HTTPException

from app.errors import QDPIError
from app.schemas import FuzzRequest, FuzzResponse
from app.services import inequality_service

logger = structlog.get_logger()
router = APIRouter()


@router.post("/fuzz", response_model=FuzzResponse)
def run_fuzz(request: FuzzRequest):
    try:
        summary, reports = inequality_service.fuzz(request)
        return FuzzResponse(summary=summary, reports=reports)

    except QDPIError:
        raise
    except Exception as e:
        logger.error("Error running fuzz campaign", inequality=request.inequality, error=str(e))
        raise HTTPException(status_code=500, detail=f"Fuzz campaign failed: {str(e)}")
