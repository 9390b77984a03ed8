from dataclasses import dataclass


@dataclass(frozen=True, slots=True)
class DTO:
    """Base class for use-case inputs and results; subclasses stay frozen and slotted."""
