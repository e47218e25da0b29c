"""
Sweep API endpoint - two-Pauli channel constant.
GET /sweep/two-pauli - numeric c(S) next to both closed forms on an x-grid.
"""

from typing import List

import structlog
from fastapi import APIRouter, HTTPException, Query

from app.errors import QDPIError
from app.schemas import SweepRow
from app.services import compute_service

logger = structlog.get_logger()
router = APIRouter()


@router.get("/sweep/two-pauli", response_model=List[SweepRow])
def sweep_two_pauli(
    start: float = Query(0.0, ge=0.0, le=1.0),
    end: float = Query(1.0, ge=0.0, le=1.0),
    steps: int = Query(11, ge=2, le=1001),
):
    try:
        return compute_service.sweep_two_pauli(start, end, steps)

    except QDPIError:
        raise
    except Exception as e:
        logger.error("Error running sweep", error=str(e))
        raise HTTPException(status_code=500, detail=f"Sweep failed: {str(e)}")
