"""
Parse API endpoint - channel expression syntax check.
POST /parse - canonical form and dimensions of an expression.
"""

from fastapi import APIRouter

from app.schemas import ParseRequest, ParseResponse
from app.services import expression_service

router = APIRouter()


@router.post("/parse", response_model=ParseResponse)
def parse_expression(request: ParseRequest):
    expr = expression_service.parse_channel(request.expression)
    dim_in, dim_out = expr.dims
    return ParseResponse(canonical=expression_service.format_channel(expr), dim_in=dim_in, dim_out=dim_out)
