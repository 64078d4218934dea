"""Configuration for the QAPCA toolkit"""
from pydantic_settings import BaseSettings
from pathlib import Path


class Settings(BaseSettings):
    """Toolkit-wide settings"""

    # Service
    app_name: str = "QAPCA Mock Annealer"
    version: str = "1.0.0"
    log_level: str = "INFO"

    # Paths
    data_dir: Path = Path("data")
    database_url: str = "sqlite+aiosqlite:///data/embeddings.db"

    # Annealing defaults
    sa_sweeps: int = 1000
    sa_beta_min: float = 0.1
    sa_beta_max: float = 10.0
    exhaustive_max_spins: int = 25

    # Coupler budget (Advantage-style abstract numbers)
    n_limit: int = 175
    chain_margin: int = 25

    # Remote annealer client
    remote_url: str = "http://127.0.0.1:8080"
    remote_timeout_seconds: float = 60.0
    remote_api_key: str | None = None

    # Mock annealer service
    api_prefix: str = "/v1"
    cors_origins: list[str] = ["*"]
    api_key: str | None = None  # Set via QAPCA_API_KEY to require X-API-Key
    mock_exhaustive_max_spins: int = 16  # larger problems go to simulated annealing
    max_problem_spins: int = 4096

    # Rate limiting
    rate_limit_enabled: bool = True
    rate_limit_requests: int = 600  # requests per window
    rate_limit_window: str = "minute"  # minute, hour, day

    # Experiments
    workers: int = 1

    class Config:
        env_prefix = "QAPCA_"
        env_file = ".env"
        env_file_encoding = "utf-8"


# Global settings instance
settings = Settings()
