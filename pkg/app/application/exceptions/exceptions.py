from app.application.exceptions.base import ApplicationError


class ObservationError(ApplicationError):
    """Use cases should raise this exception for incomplete or inconsistent statistics."""


class SolverError(ApplicationError):
    """Adapters should raise and use cases should handle this exception on backend failure."""


class LedgerMismatchError(ApplicationError):
    """Use cases should raise this exception when a constraint-ledger contract is broken."""


class NonMonotoneScanError(ApplicationError):
    """Use cases should raise this exception when sampled verdicts are not monotone in eta."""

    def __init__(self, triple: tuple[float, float, float], verdicts: tuple[str, str, str]) -> None:
        super().__init__(triple, verdicts)
        self.triple = triple
        self.verdicts = verdicts

    def __str__(self) -> str:
        return f"Verdicts {self.verdicts} at eta = {self.triple} are not monotone."


class ExperimentSpecError(ApplicationError):
    """Use cases should raise this exception for experiment specs they cannot run."""


class ConfigFileError(ApplicationError):
    """Adapters should raise and use cases should handle this exception for unreadable files."""
