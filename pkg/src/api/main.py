"""Mock annealer service"""
import logging
from contextlib import asynccontextmanager
from datetime import datetime, timezone

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from slowapi import _rate_limit_exceeded_handler
from slowapi.errors import RateLimitExceeded

from src.api.limits import limiter
from src.api.models import ErrorResponse
from src.api.routes import embeddings, health, ising
from src.config import settings
from src.embedding.database import init_db
from src.errors import QapcaError

# Configure logging
logging.basicConfig(
    level=getattr(logging, settings.log_level),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Application lifespan handler"""
    logger.info(f"Starting {settings.app_name} v{settings.version}")

    logger.info("Initializing embedding store...")
    await init_db()
    app.state.started_at = datetime.now(timezone.utc)

    logger.info("Application startup complete")

    yield

    logger.info("Shutdown complete")


app = FastAPI(
    title=settings.app_name,
    version=settings.version,
    description="Local stand-in for an annealer: Ising solves and embedding layouts",
    lifespan=lifespan
)

app.state.started_at = datetime.now(timezone.utc)
app.state.problems_solved = 0

# Configure rate limiting
app.state.limiter = limiter
app.add_exception_handler(RateLimitExceeded, _rate_limit_exceeded_handler)

# Configure CORS
app.add_middleware(
    CORSMiddleware,
    allow_origins=settings.cors_origins,
    allow_credentials=True,
    allow_methods=["*"],
    allow_headers=["*"],
)

# Include routers
app.include_router(health.router, prefix=settings.api_prefix, tags=["health"])
app.include_router(ising.router, prefix=settings.api_prefix)
app.include_router(embeddings.router, prefix=settings.api_prefix)


@app.get("/")
async def root():
    """Root endpoint"""
    return {
        "service": settings.app_name,
        "version": settings.version,
        "docs": "/docs",
        "health": f"{settings.api_prefix}/health"
    }


@app.exception_handler(QapcaError)
async def domain_error_handler(request: Request, exc: QapcaError):
    """Domain failures that escape a route are client errors"""
    logger.warning(f"{request.url.path}: {exc}")
    return JSONResponse(
        status_code=400,
        content=ErrorResponse(error=type(exc).__name__, detail=str(exc)).model_dump(),
    )


@app.exception_handler(Exception)
async def internal_error_handler(request: Request, exc: Exception):
    """500 handler"""
    logger.error(f"Internal server error: {exc}", exc_info=True)
    return JSONResponse(
        status_code=500,
        content=ErrorResponse(error="Internal server error", detail="An unexpected error occurred").model_dump(),
    )


def run(host: str = "127.0.0.1", port: int = 8080) -> None:
    import uvicorn
    uvicorn.run(app, host=host, port=port, workers=1)


if __name__ == "__main__":
    run()
