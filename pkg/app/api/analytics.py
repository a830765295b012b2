"""
Analytics API Routes

Gaussian tail quantities, η₀ and the ℓp breakdown curve.
"""
from fastapi import APIRouter, Query
from fastapi.responses import PlainTextResponse

from app.analytics import analytics_table, breakdown_threshold, big_b, big_g, eta0, eta0_closed_form
from app.analytics.schemas import AnalyticsTable, BreakdownPoint, Eta0Response
from app.harness.config import parse_grid

router = APIRouter(prefix="/analytics", tags=["analytics"])


@router.get("/eta0", response_model=Eta0Response)
async def get_eta0():
    """The L1 breakdown point under Gaussian designs."""
    value = eta0()
    return Eta0Response(eta0=value, closed_form=eta0_closed_form(), g_minus_b=big_g(value) - big_b(value))


@router.get("/table", response_model=AnalyticsTable)
async def get_table(
    p: float = Query(default=1.0, gt=0.0, le=1.0),
    start: float = Query(default=0.0, ge=0.0, le=1.0),
    stop: float = Query(default=1.0, ge=0.0, le=1.0),
    step: float = Query(default=0.05, gt=0.0, le=1.0),
):
    return analytics_table(parse_grid(f"{start}:{stop}:{step}"), p)


@router.get("/table.csv", response_class=PlainTextResponse)
async def get_table_csv(
    p: float = Query(default=1.0, gt=0.0, le=1.0),
    start: float = Query(default=0.0, ge=0.0, le=1.0),
    stop: float = Query(default=1.0, ge=0.0, le=1.0),
    step: float = Query(default=0.05, gt=0.0, le=1.0),
):
    return analytics_table(parse_grid(f"{start}:{stop}:{step}"), p).to_csv()


@router.get("/breakdown", response_model=BreakdownPoint)
async def get_breakdown(p: float = Query(default=1.0, gt=0.0, le=1.0)):
    return BreakdownPoint(p=p, threshold=breakdown_threshold(p))
