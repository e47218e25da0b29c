"""
Check API endpoint - single inequality instances.
POST /check/{inequality} - evaluate one instance and return its report.
"""

from typing import Optional

import structlog
from fastapi import APIRouter, HTTPException

from app.errors import QDPIError
from app.schemas import CheckRequest, InequalityReport
from app.services import expression_service, inequality_service
from app.utils import formats

logger = structlog.get_logger()
router = APIRouter()


def _state(name: Optional[str]):
    return formats.resolve_state(name) if name else None


def _channel(text: Optional[str]):
    return expression_service.channel_from_text(text) if text else None


@router.post("/check/{inequality}", response_model=InequalityReport)
def check_inequality(inequality: str, request: CheckRequest):
    """
    Check one inequality instance.

    Only the inputs the named check needs are read; a missing one is a 400.
    """
    try:
        report = inequality_service.run_check(
            inequality,
            channel=_channel(request.channel),
            channel1=_channel(request.channel1),
            channel2=_channel(request.channel2),
            state1=_state(request.state1),
            state2=_state(request.state2),
            sigma1=_state(request.sigma1),
            sigma2=_state(request.sigma2),
            ensemble=formats.resolve_ensemble(request.ensemble) if request.ensemble else None,
            c=request.c,
            tol=request.tol,
        )
        logger.info("Inequality checked", inequality=report.name, satisfied=report.satisfied)
        return report

    except QDPIError:
        raise
    except Exception as e:
        logger.error("Error checking inequality", inequality=inequality, error=str(e))
        raise HTTPException(status_code=500, detail=f"Failed to check {inequality}: {str(e)}")
