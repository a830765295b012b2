"""
Solve API Routes
"""
import logging

from fastapi import APIRouter

from app.solvers import solve
from app.solvers.schemas import SolveRequest, SolveResponse

logger = logging.getLogger(__name__)

router = APIRouter(tags=["solve"])


@router.post("/solve", response_model=SolveResponse)
def solve_instance(request: SolveRequest):
    """
    Run one estimator on an inline instance.

    Sync handler: FastAPI runs it in the threadpool so a long solve does not
    block the event loop.
    """
    result = solve(request.method, request.X, request.y, lam=request.lam, p=request.p, eta=request.eta)
    if not result.converged:
        logger.warning(f"{request.method} returned without converging after {result.iterations} iterations")
    return SolveResponse(
        method=result.method,
        estimate=result.estimate.tolist(),
        objective=result.objective,
        iterations=result.iterations,
        converged=result.converged,
        termination_reason=result.termination_reason,
    )
