from app.application.exceptions.base import ApplicationError
from app.application.exceptions.exceptions import (
    ConfigFileError,
    ExperimentSpecError,
    LedgerMismatchError,
    NonMonotoneScanError,
    ObservationError,
    SolverError,
)

__all__ = [
    "ApplicationError",
    "ConfigFileError",
    "ExperimentSpecError",
    "LedgerMismatchError",
    "NonMonotoneScanError",
    "ObservationError",
    "SolverError",
]
