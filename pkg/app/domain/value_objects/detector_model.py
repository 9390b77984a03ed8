from __future__ import annotations

from dataclasses import dataclass
from typing import override

import numpy as np
import numpy.typing as npt

from app.domain.exceptions import DetectorModelError, ValueObjectError
from app.domain.value_objects.base import ValueObject
from app.domain.value_objects.labels import (
    ACTIVE_OUTCOMES,
    PASSIVE_OUTCOMES,
    Outcome,
    Scheme,
)

ACTIVE_DETECTORS: tuple[str, ...] = ("H/D", "V/A")
PASSIVE_DETECTORS: tuple[str, ...] = ("H", "V", "D", "A")


@dataclass(frozen=True, repr=False)
class SchemeConfig(ValueObject):
    """Detection scheme topology.

    Args:
        scheme: Active (rotator, two detectors) or passive (splitter, four detectors).
        spatial_mode_count: Number of spatial modes resolved by the efficiency model.
    """

    scheme: Scheme
    spatial_mode_count: int = 1

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if self.spatial_mode_count < 1:
            raise ValueObjectError("A scheme needs at least one spatial mode.")

    @property
    def detectors(self) -> tuple[str, ...]:
        return ACTIVE_DETECTORS if self.scheme is Scheme.ACTIVE else PASSIVE_DETECTORS

    @property
    def detector_count(self) -> int:
        return len(self.detectors)

    @property
    def outcomes(self) -> tuple[Outcome, ...]:
        return ACTIVE_OUTCOMES if self.scheme is Scheme.ACTIVE else PASSIVE_OUTCOMES


@dataclass(frozen=True, repr=False)
class DetectorModel(ValueObject):
    """Per-spatial-mode detector efficiencies.

    Args:
        scheme: Scheme the table belongs to.
        efficiencies: Rows are spatial modes, columns are detectors
            ({H/D, V/A} active, {H, V, D, A} passive).

    Raises:
        ValueObjectError: If an efficiency leaves [0, 1].
        DetectorModelError: If the table shape does not match the scheme.
    """

    scheme: SchemeConfig
    efficiencies: tuple[tuple[float, ...], ...]

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        rows = self.efficiencies
        if len(rows) != self.scheme.spatial_mode_count:
            raise DetectorModelError(
                f"{len(rows)} efficiency rows for {self.scheme.spatial_mode_count} spatial modes."
            )
        for row in rows:
            if len(row) != self.scheme.detector_count:
                raise DetectorModelError(
                    f"{self.scheme.scheme} scheme needs {self.scheme.detector_count} "
                    f"efficiencies per spatial mode, got {len(row)}."
                )
            for eta in row:
                self._require_unit_interval("efficiency", eta)

    @classmethod
    def from_array(cls, scheme: SchemeConfig, table: npt.ArrayLike) -> DetectorModel:
        arr = np.atleast_2d(np.asarray(table, dtype=float))
        return cls(scheme, tuple(tuple(float(v) for v in row) for row in arr))

    @classmethod
    def symmetric(cls, scheme: SchemeConfig, eta: float) -> DetectorModel:
        """Expand the scalar-eta shortcut.

        One spatial mode: ``[[1, eta]]`` (active) or ``[[1, eta, 1, eta]]``
        (passive). Several spatial modes: efficiency 1 where detector index
        equals spatial-mode index and ``eta`` elsewhere.
        """
        s, k = scheme.spatial_mode_count, scheme.detector_count
        if s == 1:
            row = [1.0, eta] if k == 2 else [1.0, eta, 1.0, eta]
            return cls.from_array(scheme, [row])
        if s != k:
            raise DetectorModelError(
                f"The eta shortcut needs one spatial mode or {k} spatial modes, got {s}."
            )
        table = np.full((s, k), eta, dtype=float)
        np.fill_diagonal(table, 1.0)
        return cls.from_array(scheme, table)

    def as_array(self) -> npt.NDArray[np.float64]:
        return np.array(self.efficiencies, dtype=float)

    @property
    def max_efficiency(self) -> float:
        return float(self.as_array().max())


@dataclass(frozen=True, repr=False)
class RenormalizedModel(ValueObject):
    """Model with the common loss factored out.

    Args:
        model: Relative efficiencies, maximum entry exactly 1.
        common_transmittance: Factored-out loss eta_0 in (0, 1].
    """

    model: DetectorModel
    common_transmittance: float

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        if not 0.0 < self.common_transmittance <= 1.0:
            raise ValueObjectError("Common transmittance must lie in (0, 1].")
        if self.model.max_efficiency != 1.0:
            raise DetectorModelError("A renormalized model has maximum efficiency 1.")

    def restore(self) -> npt.NDArray[np.float64]:
        """Return the original efficiency table."""
        return self.model.as_array() * self.common_transmittance
