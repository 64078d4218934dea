"""Failure signals raised across the toolkit"""
from typing import Any, Optional


class QapcaError(Exception):
    """Base class for every domain failure"""


# Linear algebra

class SvdConvergenceError(QapcaError):
    """SVD did not converge"""


class RankDeficientError(QapcaError, ValueError):
    """Matrix rank is too low for the requested operation"""

    def __init__(self, message: str, rank: int):
        super().__init__(message)
        self.rank = rank


class NonUnitVectorError(QapcaError, ValueError):
    """Projection direction is not a unit vector"""


# Ising problems and solvers

class SpinVectorError(QapcaError, ValueError):
    """Spin vector has the wrong length or a non-±1 entry"""


class InvalidProblemError(QapcaError, ValueError):
    """Coupling list violates the Ising problem invariants"""


class ProblemTooLargeError(QapcaError):
    """Problem exceeds the exhaustive solver's spin cap"""


class RemoteTransportError(QapcaError):
    """Remote annealer could not be reached or answered with an HTTP error"""


class MalformedResponseError(QapcaError):
    """Remote annealer response does not follow the wire protocol"""


class EnergyMismatchError(QapcaError):
    """Reported energies disagree with locally recomputed energies"""


# Embedding

class AsymmetricCouplingError(QapcaError, ValueError):
    """Coupling matrix is not symmetric"""


class InfeasibleBudgetError(QapcaError):
    """Coupler budget cannot hold even the minimal banded problem"""


# Algorithms

class DegenerateComponentsError(QapcaError):
    """X·B has fewer independent columns than requested components"""

    def __init__(self, message: str, assignment: Any, rank: int):
        super().__init__(message)
        self.assignment = assignment
        self.rank = rank


class DeflationError(QapcaError):
    """Deflated data ran out of energy before all components were found"""

    def __init__(self, message: str, achieved_rank: int):
        super().__init__(message)
        self.achieved_rank = achieved_rank


class BoundUndefinedError(QapcaError):
    """Orthogonality-weight bound has a nonpositive denominator"""


# Evaluation

class UndefinedMetricError(QapcaError, ValueError):
    """Metric is undefined for the given input"""


class InvalidCountsError(QapcaError, ValueError):
    """Detection counts are inconsistent"""


class CorruptionError(QapcaError, ValueError):
    """Corruption protocol cannot be applied to the dataset"""


class CsvFormatError(QapcaError, ValueError):
    """Base class for CSV ingestion failures"""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.line = line


class MalformedRowError(CsvFormatError):
    """Row has the wrong number of fields or an empty cell"""


class NonNumericCellError(CsvFormatError):
    """Feature cell is not a number"""


class MissingLabelColumnError(CsvFormatError):
    """Schema names a label column the header lacks"""
