from __future__ import annotations

from dataclasses import dataclass
from typing import override

from app.domain.exceptions import ValueObjectError
from app.domain.value_objects.base import ValueObject
from app.domain.value_objects.labels import Polarization


@dataclass(frozen=True, repr=False)
class ModeSet(ValueObject):
    """Optical modes seen by Bob: one polarization pair per spatial mode.

    Modes are ordered spatial-major, polarization-minor, so mode index
    ``2 * s + p`` addresses polarization ``p`` of spatial mode ``s``.

    Args:
        spatial_mode_count: Number of spatial modes (>= 1).
        polarization: Which polarization pair labels the modes.
    """

    spatial_mode_count: int
    polarization: Polarization = Polarization.HV

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if self.spatial_mode_count < 1:
            raise ValueObjectError("A mode set needs at least one spatial mode.")

    @property
    def mode_count(self) -> int:
        return 2 * self.spatial_mode_count

    @property
    def labels(self) -> tuple[str, ...]:
        first, second = str(self.polarization)
        return tuple(
            f"{label}{s + 1}"
            for s in range(self.spatial_mode_count)
            for label in (first, second)
        )

    def rotated(self) -> ModeSet:
        """Return the same spatial layout viewed in the other polarization basis."""
        return ModeSet(self.spatial_mode_count, self.polarization.other)


@dataclass(frozen=True, repr=False)
class FockBasisState(ValueObject):
    """Occupation-number basis state.

    Args:
        occupations: Photon count per mode, in ModeSet order.
    """

    occupations: tuple[int, ...]

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if any(n < 0 for n in self.occupations):
            raise ValueObjectError("Occupations must be non-negative.")

    @property
    def total_photons(self) -> int:
        return sum(self.occupations)

    def spatial_pattern(self) -> tuple[int, ...]:
        """Return photons per spatial mode."""
        occ = self.occupations
        return tuple(occ[i] + occ[i + 1] for i in range(0, len(occ), 2))

    @override
    def __str__(self) -> str:
        return "|" + ",".join(str(n) for n in self.occupations) + ">"
