"""
Certificate API Routes
"""
from fastapi import APIRouter, Query

from app.certificates import direction_gap, dkw_band, shelling_bounds
from app.certificates.schemas import DirectionGapRequest, DKWResponse, ShellingBounds, ShellingBoundsRequest

router = APIRouter(prefix="/certificates", tags=["certificates"])


@router.post("/shelling-bounds", response_model=ShellingBounds)
async def post_shelling_bounds(request: ShellingBoundsRequest):
    return shelling_bounds(request.L, request.U, request.alpha, request.k, request.delta)


@router.get("/dkw", response_model=DKWResponse)
async def get_dkw(m: int = Query(..., ge=1), tau: float = Query(..., gt=0.0)):
    return DKWResponse(m=m, tau=tau, band=dkw_band(m, tau))


@router.post("/direction-gap")
async def post_direction_gap(request: DirectionGapRequest):
    """min over |T| ≤ ηm of ‖(Xv)_T̄‖₁ − ‖(Xv)_T‖₁."""
    return {"eta": request.eta, "gap": direction_gap(request.X, request.v, request.eta)}
