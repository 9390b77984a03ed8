from __future__ import annotations

from dataclasses import dataclass
from typing import override

from app.domain.exceptions import ValueObjectError
from app.domain.value_objects.base import ValueObject


@dataclass(frozen=True, repr=False)
class ChannelParams(ValueObject):
    """Toy channel parameters.

    Args:
        omega: Depolarizing probability.
        loss: Single-photon loss probability r.
        multi_photon: Intercept-resend probability p.
        n_resend: Photons resent by the eavesdropper; ``None`` means the
            infinite-photon limit.
    """

    omega: float
    loss: float = 0.0
    multi_photon: float = 0.0
    n_resend: int | None = None

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        for name in ("omega", "loss", "multi_photon"):
            self._require_unit_interval(name, getattr(self, name))
        if self.n_resend is not None and self.n_resend < 1:
            raise ValueObjectError("n_resend must be a positive integer or infinite.")

    @property
    def resend_is_infinite(self) -> bool:
        return self.n_resend is None

    def with_omega(self, omega: float) -> ChannelParams:
        return ChannelParams(omega, self.loss, self.multi_photon, self.n_resend)
