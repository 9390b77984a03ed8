from __future__ import annotations

from enum import StrEnum


class Polarization(StrEnum):
    """Polarization basis of a pair of optical modes."""

    HV = "HV"
    DA = "DA"

    @property
    def other(self) -> Polarization:
        return Polarization.DA if self is Polarization.HV else Polarization.HV


class Scheme(StrEnum):
    """Detection scheme topology."""

    ACTIVE = "active"
    PASSIVE = "passive"


class AliceOutcome(StrEnum):
    """Alice's BB84 outcomes; each carries POVM element |x><x|/2 on her qubit."""

    H = "H"
    V = "V"
    D = "D"
    A = "A"

    @property
    def basis(self) -> Polarization:
        return Polarization.HV if self in (AliceOutcome.H, AliceOutcome.V) else Polarization.DA


class Outcome(StrEnum):
    """Bob's click outcomes.

    The active scheme splits no-click per basis ("none+" for H/V, "nonex" for D/A);
    the passive scheme has a single no-click outcome and the cross click.
    """

    NONE = "none"
    NONE_HV = "none+"
    NONE_DA = "nonex"
    H = "H"
    V = "V"
    HV = "HV"
    D = "D"
    A = "A"
    DA = "DA"
    CC = "CC"

    @property
    def basis(self) -> Polarization | None:
        match self:
            case Outcome.H | Outcome.V | Outcome.HV | Outcome.NONE_HV:
                return Polarization.HV
            case Outcome.D | Outcome.A | Outcome.DA | Outcome.NONE_DA:
                return Polarization.DA
            case _:
                return None

    @property
    def is_no_click(self) -> bool:
        return self in (Outcome.NONE, Outcome.NONE_HV, Outcome.NONE_DA)


ACTIVE_OUTCOMES: tuple[Outcome, ...] = (
    Outcome.H,
    Outcome.V,
    Outcome.HV,
    Outcome.NONE_HV,
    Outcome.D,
    Outcome.A,
    Outcome.DA,
    Outcome.NONE_DA,
)
PASSIVE_OUTCOMES: tuple[Outcome, ...] = (
    Outcome.NONE,
    Outcome.H,
    Outcome.V,
    Outcome.D,
    Outcome.A,
    Outcome.HV,
    Outcome.DA,
    Outcome.CC,
)
SQUASHED_ACTIVE_OUTCOMES: tuple[Outcome, ...] = (
    Outcome.H,
    Outcome.V,
    Outcome.NONE_HV,
    Outcome.D,
    Outcome.A,
    Outcome.NONE_DA,
)
SQUASHED_PASSIVE_OUTCOMES: tuple[Outcome, ...] = (
    Outcome.NONE,
    Outcome.H,
    Outcome.V,
    Outcome.D,
    Outcome.A,
)


class WitnessKind(StrEnum):
    """Photon-bound witness operators."""

    DC = "DC"
    EE = "EE"
    CC = "CC"


class Verdict(StrEnum):
    """Outcome of an entanglement verification."""

    ENTANGLED = "ENTANGLED"
    NOT_VERIFIED = "NOT_VERIFIED"
    INCONCLUSIVE = "INCONCLUSIVE"


class ConstraintGroup(StrEnum):
    """Provenance tags of compiled EVM constraints."""

    OBSERVATION = "observation"
    ALICE_CROSS = "alice-cross"
    COMMUTING = "operator-relation"
    COMMUTATION = "commutation"
    REALNESS = "realness"
    PROJECTION = "projection-decomposition"
    RELATION = "relation-inequality"
    PHOTON_TAIL = "photon-tail"


class Relation(StrEnum):
    """Relation of a linear constraint to its right-hand side."""

    EQ = "="
    GE = ">="


class SolverStatus(StrEnum):
    """Termination status reported by a conic solver.

    ``exact`` marks values obtained without a solver (closed form or eigenvalues).
    """

    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    INACCURATE = "inaccurate"
    FAILED = "failed"
    EXACT = "exact"

    @property
    def usable(self) -> bool:
        return self in (SolverStatus.OPTIMAL, SolverStatus.EXACT)
