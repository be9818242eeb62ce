"""
FastAPI application for the central-spin simulator
Provides authenticated endpoints for time evolution, scaling fits and verification
"""
import hmac
import logging
import math
import os
import threading
from typing import List, Optional

from fastapi import Depends, FastAPI, HTTPException, Request, Security
from fastapi.security import APIKeyHeader
from pydantic import BaseModel, Field
from slowapi import Limiter, _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded

from src.core.engines import Engine
from src.core.orchestrator import SimulationOrchestrator
from src.services.verification_service import VERIFY_MIN_BATH

API_MAX_BATH = 2000
API_MAX_STEPS = 2001
API_MAX_VERIFY_BATH = 8

logger = logging.getLogger(__name__)

app = FastAPI(
    title="Central Spin Simulation API",
    description="Decoherence dynamics of a central spin coupled to a spin bath",
    version="1.0.0"
)

orchestrator = SimulationOrchestrator()

# Simulation routes need x-api-key unless ALLOW_OPEN_ACCESS is set and no key is configured
API_KEY_NAME = "x-api-key"
api_key_header = APIKeyHeader(name=API_KEY_NAME, auto_error=False)
OPEN_ACCESS_WARNING_MESSAGE = "API_KEY is not configured; simulation endpoints are open."
DEFAULT_SIMULATION_RATE_LIMIT = os.getenv("SIMULATION_RATE_LIMIT", "30/minute")
_open_access_warned = threading.Event()

limiter = Limiter(
    key_func=lambda request: (
        f"{request.client.host if request.client else 'anonymous'}:"
        f"{request.headers.get(API_KEY_NAME, 'anonymous')}"
    )
)
app.state.limiter = limiter
app.state.simulation_rate_limit = DEFAULT_SIMULATION_RATE_LIMIT
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)


def reset_open_access_warning() -> None:
    _open_access_warned.clear()


def set_simulation_rate_limit(limit: str) -> None:
    """Rate limit string applied to /evolve, such as 30/minute"""
    app.state.simulation_rate_limit = limit


def _simulation_rate_limit() -> str:
    return str(app.state.simulation_rate_limit)


def verify_api_key(api_key: Optional[str] = Security(api_key_header)) -> Optional[str]:
    """
    Check the x-api-key header against API_KEY

    Raises:
        HTTPException: 500 when no key is configured and open access is off, 401 on a bad key
    """
    expected = os.getenv("API_KEY")
    if not expected:
        if os.getenv("ALLOW_OPEN_ACCESS", "").strip().lower() not in {"1", "true", "yes", "on"}:
            raise HTTPException(status_code=500, detail="API key not configured on server")
        if not _open_access_warned.is_set():
            _open_access_warned.set()
            logger.warning(OPEN_ACCESS_WARNING_MESSAGE)
        return None
    if not isinstance(api_key, str) or not hmac.compare_digest(api_key, expected):
        raise HTTPException(status_code=401, detail="Invalid or missing API key")
    return api_key


class EvolveRequest(BaseModel):
    """Time evolution of one initial state"""
    family: str = Field(..., min_length=1)
    n: int = Field(..., ge=1, le=API_MAX_BATH)
    theta: Optional[float] = Field(default=None, ge=0.0, le=math.pi / 2)
    t_max: float = Field(default=2 * math.pi, ge=0.0, le=1000.0)
    steps: int = Field(default=101, ge=1, le=API_MAX_STEPS)
    engine: str = Field(default=Engine.COLLECTIVE.value)


class ScalingRequest(BaseModel):
    """Amplitude scaling over bath sizes"""
    families: List[str] = Field(default_factory=lambda: ["product", "ghz", "w", "ep"], min_length=1)
    n_list: List[int] = Field(default_factory=lambda: [64, 128, 256, 512, 1024], min_length=4, max_length=32)


class VerifyRequest(BaseModel):
    """Consistency matrix over N = 3 .. n_max"""
    n_max: int = Field(default=6, ge=VERIFY_MIN_BATH - 1, le=API_MAX_VERIFY_BATH)
    t_points: int = Field(default=20, ge=1, le=200)
    theta_points: int = Field(default=3, ge=1, le=9)


@app.get("/")
def root():
    """Root endpoint - API information"""
    return {
        "service": "Central Spin Simulation API",
        "version": "1.0.0",
        "status": "operational",
        "endpoints": ["/evolve", "/scaling", "/verify", "/health", "/docs"]
    }


@app.get("/health")
def health_check():
    """Health check endpoint"""
    return {"status": "healthy", "system": orchestrator.get_system_status()}


@app.post("/evolve", dependencies=[Depends(verify_api_key)])
@limiter.limit(_simulation_rate_limit)
def evolve(request: Request, payload: EvolveRequest):
    """
    Time series F0, C0, C1 and E01 for one initial state

    Raises:
        HTTPException: 400 for parameters the simulator rejects
    """
    try:
        series = orchestrator.evolve(
            family=payload.family,
            n_bath=payload.n,
            t_max=payload.t_max,
            steps=payload.steps,
            theta=payload.theta,
            engine=payload.engine
        )
        return {"series": series.to_dict()}
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


@app.post("/scaling", dependencies=[Depends(verify_api_key)])
def scaling(payload: ScalingRequest):
    """Amplitude samples and log-log fits per family"""
    try:
        return orchestrator.run_scaling(payload.families, payload.n_list)
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e


@app.post("/verify", dependencies=[Depends(verify_api_key)])
def verify(payload: VerifyRequest):
    """Consistency report for small bath sizes"""
    try:
        report = orchestrator.run_verification(
            range(VERIFY_MIN_BATH, payload.n_max + 1), payload.t_points, payload.theta_points
        )
        return {"report": report.to_dict()}
    except ValueError as e:
        raise HTTPException(status_code=400, detail=str(e)) from e
