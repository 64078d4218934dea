"""Client for a remote annealer speaking the JSON solve protocol"""
import logging
import time
from typing import Optional

import numpy as np
import requests
from pydantic import ValidationError

from src.api.models import SolveRequest, SolveResponse
from src.config import settings
from src.errors import EnergyMismatchError, MalformedResponseError, RemoteTransportError
from src.ising.problem import IsingProblem, SampleSet

logger = logging.getLogger(__name__)

SOLVE_PATH = "/v1/ising/solve"
ENERGY_TOLERANCE = 1e-6


class RemoteAnnealer:
    """Blocking client for one annealer endpoint"""

    def __init__(
        self,
        endpoint: str,
        timeout: Optional[float] = None,
        api_key: Optional[str] = None,
        session: Optional[requests.Session] = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.timeout = settings.remote_timeout_seconds if timeout is None else timeout
        self.api_key = settings.remote_api_key if api_key is None else api_key
        self._session = session or requests.Session()

    @property
    def solve_url(self) -> str:
        return f"{self.endpoint}{SOLVE_PATH}"

    def solve(self, problem: IsingProblem, reads: int, seed: Optional[int] = None) -> SampleSet:
        """
        Submit a problem and return the validated sample set.

        Raises:
            RemoteTransportError: connection failure, timeout or HTTP error status
            MalformedResponseError: body is not valid protocol JSON
            EnergyMismatchError: a reported energy disagrees with the local energy
        """
        payload = SolveRequest(
            size=problem.size,
            couplings=problem.couplings(),
            num_reads=reads,
            seed=None if seed is None else seed % (1 << 64),
        )
        headers = {"X-API-Key": self.api_key} if self.api_key else {}

        started = time.monotonic()
        try:
            response = self._session.post(
                self.solve_url,
                json=payload.model_dump(exclude_none=True),
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
        except requests.HTTPError as e:
            raise RemoteTransportError(f"annealer at {self.solve_url} returned HTTP {e.response.status_code}") from e
        except requests.RequestException as e:
            raise RemoteTransportError(f"cannot reach annealer at {self.solve_url}: {e}") from e
        logger.info(
            f"Remote solve of {problem.size} spins returned in {time.monotonic() - started:.2f}s"
        )

        try:
            body = SolveResponse.model_validate_json(response.content)
        except ValidationError as e:
            raise MalformedResponseError(f"annealer response violates the protocol: {e}") from e

        return self._validated(problem, body)

    def _validated(self, problem: IsingProblem, body: SolveResponse) -> SampleSet:
        samples = np.asarray(body.samples)
        if samples.ndim != 2 or samples.shape[1] != problem.size:
            raise MalformedResponseError(
                f"expected samples of length {problem.size}, got array of shape {samples.shape}"
            )
        if not np.all((samples == 1) | (samples == -1)):
            raise MalformedResponseError("samples contain entries other than +1/-1")

        reported = np.asarray(body.energies, dtype=float)
        local = problem.energies(samples)
        worst = float(np.max(np.abs(local - reported)))
        if worst > ENERGY_TOLERANCE:
            raise EnergyMismatchError(
                f"reported energies differ from recomputed energies by up to {worst:.3g}"
            )
        return SampleSet.from_raw(samples, local, body.occurrences)


def solve_remote(
    problem: IsingProblem,
    endpoint: str,
    reads: int,
    seed: Optional[int] = None,
    timeout: Optional[float] = None,
) -> SampleSet:
    """One-shot remote solve"""
    return RemoteAnnealer(endpoint, timeout=timeout).solve(problem, reads, seed=seed)
