"""
Main FastAPI application entry point.
HTTP surface of the quantum data-processing toolkit: computations, inequality
checks, fuzz campaigns, the two-Pauli sweep and expression parsing.
"""

import structlog
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from app.api import check, compute, fuzz, parse, sweep
from app.config import settings
from app.errors import QDPIError
from app.utils.logger import configure_logging

# Configure logging
configure_logging()
logger = structlog.get_logger()

# Create FastAPI app
app = FastAPI(
    title=settings.app_name,
    version=settings.app_version,
    description="""
    Quantum data-processing toolkit

    Features:
    - Von Neumann and relative entropies, coherent information
    - Channel constant c(S) with a pure-state witness
    - Lindblad, joint convexity, data-processing and channel convexity checks
    - Strengthened Lindblad and data-processing checks with CP diagnostics
    - Seeded fuzz campaigns and the two-Pauli sweep
    """,
)

# CORS configuration
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(compute.router, tags=["Computations"])
app.include_router(check.router, tags=["Inequality Checks"])
app.include_router(fuzz.router, tags=["Fuzzing"])
app.include_router(sweep.router, tags=["Sweeps"])
app.include_router(parse.router, tags=["Channel Expressions"])


@app.exception_handler(QDPIError)
async def toolkit_error_handler(request: Request, exc: QDPIError):
    """Invalid inputs, unknown names and parse errors are client errors."""
    logger.warning("Request rejected", path=request.url.path, error=str(exc))
    content = {"detail": str(exc), "error": type(exc).__name__}
    for attribute in ("kind", "line", "column", "expected", "operator_index"):
        if hasattr(exc, attribute):
            value = getattr(exc, attribute)
            content[attribute] = list(value) if isinstance(value, tuple) else value
    return JSONResponse(status_code=400, content=content)


@app.exception_handler(ValidationError)
async def validation_error_handler(request: Request, exc: ValidationError):
    logger.warning("Request rejected", path=request.url.path, error=str(exc))
    return JSONResponse(status_code=400, content={"detail": str(exc), "error": "ValidationError"})


@app.on_event("startup")
async def startup_event():
    logger.info("Starting quantum data-processing toolkit", version=settings.app_version)


@app.get("/", tags=["Health"])
async def root():
    """Root endpoint - API information."""
    return {
        "name": settings.app_name,
        "version": settings.app_version,
        "status": "running",
        "features": [
            "Entropies and Coherent Information",
            "Channel Constant",
            "Inequality Checks",
            "Fuzz Campaigns",
            "Two-Pauli Sweep",
        ],
    }


@app.get("/health", tags=["Health"])
async def health_check():
    """Health check endpoint."""
    return {"status": "healthy", "version": settings.app_version}


if __name__ == "__main__":
    import uvicorn

    uvicorn.run("app.main:app", host=settings.api_host, port=settings.api_port, reload=settings.debug)
