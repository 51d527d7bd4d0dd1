from fastapi import APIRouter
from pydantic import BaseModel

from core.config import settings
from schemas.backend import Backend
from schemas.health_status import HealthStatus

router = APIRouter()
USE_API_PREFIX = False  # keeps the health check at /health


class HealthResponse(BaseModel):
    status: HealthStatus = HealthStatus.HEALTHY
    project: str = settings.PROJECT_NAME
    version: str = settings.VERSION
    backends: list[Backend] = list(Backend)
    tolerance: float = settings.MK_TOL


@router.get("/health", response_model=HealthResponse)
async def health_check():
    return HealthResponse(tolerance=settings.MK_TOL)
