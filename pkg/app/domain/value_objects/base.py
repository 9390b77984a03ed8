from __future__ import annotations

import math
from abc import ABC
from dataclasses import dataclass, fields
from typing import override

from app.domain.exceptions import ValueObjectError


@dataclass(frozen=True, repr=False)
class ValueObject(ABC):
    """Immutable value object base type."""

    def __post_init__(self) -> None:
        """Ensure at least one field exists.

        Raises:
            ValueObjectError: When the dataclass has no fields.
        """
        if not fields(self):
            raise ValueObjectError(f"{type(self).__name__} must have at least one field!")

    @override
    def __repr__(self) -> str:
        return f"{type(self).__name__}({self._repr_value()})"

    def _repr_value(self) -> str:
        """Build the inner representation used by __repr__.

        Returns:
            str: Field value string; long tuples are shown by their length.
        """

        def short(value: object) -> str:
            if isinstance(value, tuple) and len(value) > 8:
                return f"<{len(value)} items>"
            return repr(value)

        all_fields = fields(self)
        if len(all_fields) == 1:
            return short(getattr(self, all_fields[0].name))
        return ", ".join(f"{f.name}={short(getattr(self, f.name))}" for f in all_fields)

    @staticmethod
    def _require_unit_interval(name: str, value: float) -> None:
        """Raise unless ``value`` is a number in [0, 1].

        Raises:
            ValueObjectError: On NaN or out-of-range values.
        """
        if math.isnan(value) or not 0.0 <= value <= 1.0:
            raise ValueObjectError(f"{name} = {value} outside [0, 1].")
