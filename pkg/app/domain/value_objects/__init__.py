from app.domain.value_objects.channel_params import ChannelParams
from app.domain.value_objects.detector_model import (
    DetectorModel,
    RenormalizedModel,
    SchemeConfig,
)
from app.domain.value_objects.fock import ComplexMatrix, FockOperator, FockSpace
from app.domain.value_objects.labels import (
    ACTIVE_OUTCOMES,
    PASSIVE_OUTCOMES,
    SQUASHED_ACTIVE_OUTCOMES,
    SQUASHED_PASSIVE_OUTCOMES,
    AliceOutcome,
    ConstraintGroup,
    Outcome,
    Polarization,
    Relation,
    Scheme,
    SolverStatus,
    Verdict,
    WitnessKind,
)
from app.domain.value_objects.modes import FockBasisState, ModeSet
from app.domain.value_objects.statistics import ObservedStatistics, outcome_alphabet

__all__ = [
    "ACTIVE_OUTCOMES",
    "PASSIVE_OUTCOMES",
    "SQUASHED_ACTIVE_OUTCOMES",
    "SQUASHED_PASSIVE_OUTCOMES",
    "AliceOutcome",
    "ChannelParams",
    "ComplexMatrix",
    "ConstraintGroup",
    "DetectorModel",
    "FockBasisState",
    "FockOperator",
    "FockSpace",
    "ModeSet",
    "ObservedStatistics",
    "Outcome",
    "Polarization",
    "Relation",
    "RenormalizedModel",
    "Scheme",
    "SchemeConfig",
    "SolverStatus",
    "Verdict",
    "WitnessKind",
    "outcome_alphabet",
]
