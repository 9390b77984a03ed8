from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import override

import numpy as np
import numpy.typing as npt

from app.domain.exceptions import ValueObjectError
from app.domain.value_objects.base import ValueObject
from app.domain.value_objects.constants import PROBABILITY_TOL
from app.domain.value_objects.labels import (
    ACTIVE_OUTCOMES,
    PASSIVE_OUTCOMES,
    SQUASHED_ACTIVE_OUTCOMES,
    SQUASHED_PASSIVE_OUTCOMES,
    AliceOutcome,
    Outcome,
    Polarization,
    Scheme,
)

# Bob outcome that counts as an error for each Alice outcome, same basis.
_ERROR_OUTCOME: dict[AliceOutcome, Outcome] = {
    AliceOutcome.H: Outcome.V,
    AliceOutcome.V: Outcome.H,
    AliceOutcome.D: Outcome.A,
    AliceOutcome.A: Outcome.D,
}
_DOUBLE_CLICK: dict[Polarization, Outcome] = {
    Polarization.HV: Outcome.HV,
    Polarization.DA: Outcome.DA,
}


def outcome_alphabet(scheme: Scheme, squashed: bool = False) -> tuple[Outcome, ...]:
    """Return Bob's outcome alphabet for a scheme."""
    if squashed:
        return SQUASHED_ACTIVE_OUTCOMES if scheme is Scheme.ACTIVE else SQUASHED_PASSIVE_OUTCOMES
    return ACTIVE_OUTCOMES if scheme is Scheme.ACTIVE else PASSIVE_OUTCOMES


@dataclass(frozen=True, repr=False)
class ObservedStatistics(ValueObject):
    """Joint outcome probabilities p(x, y).

    Active-scheme entries are conditional on Bob's basis choice, so the entries of
    each basis sum to one. Passive-scheme entries sum to one overall.

    Args:
        scheme: Scheme that produced the table.
        probabilities: Probability per (Alice outcome, Bob outcome).
        squashed: Whether the table uses the squashed alphabet.

    Raises:
        ValueObjectError: On missing entries, probabilities outside [0, 1],
            broken normalization or inconsistent Alice marginals.
    """

    scheme: Scheme
    probabilities: Mapping[tuple[AliceOutcome, Outcome], float]
    squashed: bool = False

    @override
    def __post_init__(self) -> None:
        super().__post_init__()
        alphabet = self.outcomes
        expected = {(x, y) for x in AliceOutcome for y in alphabet}
        keys = set(self.probabilities)
        if missing := expected - keys:
            raise ValueObjectError(f"Statistics miss {len(missing)} entries, e.g. {min(missing)}.")
        if extra := keys - expected:
            raise ValueObjectError(f"Statistics carry unknown entries, e.g. {min(extra)}.")
        for key, value in self.probabilities.items():
            if not -PROBABILITY_TOL <= value <= 1 + PROBABILITY_TOL:
                raise ValueObjectError(f"Probability {value} for {key} outside [0, 1].")
        for basis in self._normalization_groups():
            total = sum(self.p(x, y) for x in AliceOutcome for y in basis)
            if abs(total - 1.0) > PROBABILITY_TOL:
                raise ValueObjectError(f"Probabilities sum to {total}, expected 1.")
        if self.scheme is Scheme.ACTIVE:
            for x in AliceOutcome:
                groups = self._normalization_groups()
                hv, da = (sum(self.p(x, y) for y in group) for group in groups)
                if abs(hv - da) > PROBABILITY_TOL:
                    raise ValueObjectError(f"Alice marginal of {x} differs between Bob's bases.")

    @override
    def _repr_value(self) -> str:
        entries = len(self.probabilities)
        return f"scheme={self.scheme!s}, squashed={self.squashed}, entries={entries}"

    @property
    def outcomes(self) -> tuple[Outcome, ...]:
        return outcome_alphabet(self.scheme, self.squashed)

    def _normalization_groups(self) -> list[tuple[Outcome, ...]]:
        if self.scheme is Scheme.ACTIVE:
            return [
                tuple(y for y in self.outcomes if y.basis is basis)
                for basis in (Polarization.HV, Polarization.DA)
            ]
        return [self.outcomes]

    def p(self, x: AliceOutcome, y: Outcome) -> float:
        return float(self.probabilities[(x, y)])

    def alice_probability(self, x: AliceOutcome) -> float:
        """Return Alice's marginal, averaged over Bob's bases for the active scheme."""
        groups = self._normalization_groups()
        return sum(sum(self.p(x, y) for y in g) for g in groups) / len(groups)

    def reduced_alice_state(self) -> npt.NDArray[np.float64]:
        """Return Alice's qubit state implied by her marginals.

        Alice's POVM is |x><x|/2, so <x|rho_A|x> = 2 P(x); the real coherence
        equals P(D) - P(A). The imaginary coherence is unobserved and set to 0.
        """
        hh = 2 * self.alice_probability(AliceOutcome.H)
        vv = 2 * self.alice_probability(AliceOutcome.V)
        hv = self.alice_probability(AliceOutcome.D) - self.alice_probability(AliceOutcome.A)
        return np.array([[hh, hv], [hv, vv]])

    def bob_probability(self, y: Outcome) -> float:
        """Return <I (x) M_y>, conditional on y's basis in the active scheme."""
        return sum(self.p(x, y) for x in AliceOutcome)

    def double_click(self) -> float:
        """d_obs = <M_HV>/2 + <M_DA>/2 (active scheme)."""
        return 0.5 * self.bob_probability(Outcome.HV) + 0.5 * self.bob_probability(Outcome.DA)

    def effective_error(self) -> float:
        """e_obs: errors plus half the double clicks, averaged over bases."""
        total = 0.0
        for x in AliceOutcome:
            total += self.p(x, _ERROR_OUTCOME[x]) + 0.5 * self.p(x, _DOUBLE_CLICK[x.basis])
        return 0.5 * total

    def cross_click(self) -> float:
        """c_obs = <M_CC> (passive scheme)."""
        return self.bob_probability(Outcome.CC)

    def error_rate(self, basis: Polarization) -> float:
        """Return the same-basis error rate among single clicks of ``basis``."""
        alice = [x for x in AliceOutcome if x.basis is basis]
        errors = sum(self.p(x, _ERROR_OUTCOME[x]) for x in alice)
        singles = sum(self.p(x, y) for x in alice for y in (_ERROR_OUTCOME[a] for a in alice))
        return errors / singles if singles > 0 else 0.0
