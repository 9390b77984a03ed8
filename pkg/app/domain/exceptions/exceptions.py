from app.domain.exceptions.base import DomainError


class ValueObjectError(DomainError):
    """
    Exception for validation errors in Value Objects:
    1. Violations of Value Object invariants during creation.
    2. Out-of-range probabilities, efficiencies or channel parameters.
    """


class FockSpaceError(DomainError):
    """Raised on cutoff, grade or dimension misuse of truncated Fock spaces."""


class DetectorModelError(DomainError):
    """Raised when a detector model does not fit its scheme or cannot be renormalized."""


class PovmConstructionError(DomainError):
    """Raised when a built POVM fails completeness or positivity checks."""


class DecompositionError(DomainError):
    """Raised when a projected block lies outside the ideal-operator span."""


class PhotonBoundError(DomainError):
    """Raised when a photon-bound table lacks the rows a tail bound needs."""
