from app.domain.exceptions.base import DomainError
from app.domain.exceptions.exceptions import (
    DecompositionError,
    DetectorModelError,
    FockSpaceError,
    PhotonBoundError,
    PovmConstructionError,
    ValueObjectError,
)

__all__ = [
    "DomainError",
    "DecompositionError",
    "DetectorModelError",
    "FockSpaceError",
    "PhotonBoundError",
    "PovmConstructionError",
    "ValueObjectError",
]
