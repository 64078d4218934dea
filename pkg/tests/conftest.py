"""Shared fixtures; environment is pinned before any src import"""
import os
import tempfile
import threading
import time
from pathlib import Path

_STATE_DIR = tempfile.mkdtemp(prefix="qapca-tests-")
os.environ.setdefault("QAPCA_DATA_DIR", _STATE_DIR)
os.environ.setdefault("QAPCA_DATABASE_URL", f"sqlite+aiosqlite:///{_STATE_DIR}/embeddings.db")
os.environ.setdefault("QAPCA_RATE_LIMIT_ENABLED", "false")

import numpy as np  # noqa: E402
import pytest  # noqa: E402

from tests.helpers import free_port  # noqa: E402

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def toy_X() -> np.ndarray:
    """Three samples in two dimensions; the best sign vector is ±[1, 1, -1]"""
    return np.array([[1.0, 1.0, -1.0], [0.0, 1.0, 1.0]])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def mock_server():
    """The mock annealer served by uvicorn on a background thread"""
    import uvicorn

    from src.api.main import app

    port = free_port()
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port, log_level="warning"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()

    deadline = time.monotonic() + 10
    while not server.started:
        if time.monotonic() > deadline:
            raise RuntimeError("mock annealer did not start")
        time.sleep(0.05)

    yield app, f"http://127.0.0.1:{port}"

    server.should_exit = True
    thread.join(timeout=5)
