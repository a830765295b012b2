"""
Robust L1 Regression Lab - HTTP Application
FastAPI surface over the analytics, solvers and certificates
"""
import logging
from contextlib import asynccontextmanager

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from app.api import analytics_router, certificates_router, solve_router
from app.core.config import get_settings
from app.core.exceptions import DimensionMismatchError, DomainError, RobustRegressionError
from app.core.sentry import capture_exception, init_sentry

settings = get_settings()

logging.basicConfig(
    level=settings.log_level.upper(),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s"
)
logger = logging.getLogger(__name__)

init_sentry()


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Startup and shutdown events"""
    logger.info(f"Starting {settings.app_name} v{settings.app_version}")
    yield
    logger.info("Shutting down application")


app = FastAPI(
    title=settings.app_name,
    description="""
    Robust L1 Regression Lab API

    - Gaussian tail analytics: η₀, G/B tables, ℓp breakdown curve
    - L1, L1-ball constrained, ℓp and baseline estimators
    - Robustness certificates: shelling bounds, DKW bands, direction gaps
    """,
    version=settings.app_version,
    lifespan=lifespan,
)


@app.exception_handler(DomainError)
@app.exception_handler(DimensionMismatchError)
async def invalid_input_handler(request: Request, exc: RobustRegressionError):
    return JSONResponse(
        status_code=422,
        content={"error": "invalid_input", "message": str(exc), "type": type(exc).__name__},
    )


@app.exception_handler(RobustRegressionError)
async def numerical_error_handler(request: Request, exc: RobustRegressionError):
    logger.warning(f"{request.url.path}: {type(exc).__name__}: {exc}")
    return JSONResponse(
        status_code=400,
        content={"error": "numerical_failure", "message": str(exc), "type": type(exc).__name__},
    )


@app.exception_handler(Exception)
async def global_exception_handler(request: Request, exc: Exception):
    """Catch-all exception handler for unhandled errors."""
    logger.error(f"Unhandled exception: {exc}", exc_info=True)
    capture_exception(exc, extra={"path": request.url.path})

    if settings.environment == "production":
        return JSONResponse(
            status_code=500,
            content={
                "error": "internal_server_error",
                "message": "An unexpected error occurred.",
            }
        )
    return JSONResponse(
        status_code=500,
        content={
            "error": "internal_server_error",
            "message": str(exc),
            "type": type(exc).__name__
        }
    )


app.include_router(analytics_router, prefix="/api/v1")
app.include_router(solve_router, prefix="/api/v1")
app.include_router(certificates_router, prefix="/api/v1")


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "message": "Robust L1 Regression Lab API",
        "version": settings.app_version,
        "environment": settings.environment,
        "docs": "/docs"
    }


@app.get("/health")
async def health_check():
    """Health check endpoint for monitoring"""
    return {
        "status": "healthy",
        "app": settings.app_name,
        "version": settings.app_version
    }
