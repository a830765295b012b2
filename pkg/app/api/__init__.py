"""
API Routes Initialization

Exports all routers for main.py to import.
"""
from app.api.analytics import router as analytics_router
from app.api.certificates import router as certificates_router
from app.api.solve import router as solve_router

__all__ = [
    "analytics_router",
    "certificates_router",
    "solve_router",
]
