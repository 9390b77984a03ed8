from __future__ import annotations

import asyncio
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache

from app.application.dto import (
    ChannelDTO,
    ConstraintRowDTO,
    ModelDTO,
    PipelineDTO,
    StatisticsDTO,
    VerdictDTO,
)
from app.application.exceptions import ObservationError
from app.application.ports import SolverBackend, SolverBackendFactory
from app.config.logging import get_logger
from app.domain.exceptions import ValueObjectError
from app.domain.services.channel import simulate_statistics, squash_statistics, verify_squashed
from app.domain.services.detectors import renormalize
from app.domain.services.evm import EVMProblem, compile_problem
from app.domain.services.fockspace import enumerate_basis
from app.domain.services.idealops import OperatorDictionary, build_dictionary
from app.domain.services.photon_bounds import (
    PhotonBoundTable,
    bound_table,
    photon_tail_bounds,
    witness_kinds,
)
from app.domain.services.verdicts import FeasibilityVerdict, verify
from app.domain.value_objects import (
    AliceOutcome,
    ChannelParams,
    ConstraintGroup,
    DetectorModel,
    ModeSet,
    ObservedStatistics,
    Outcome,
    Scheme,
    SchemeConfig,
    Verdict,
    WitnessKind,
)

logger = get_logger(__name__)

# Statement counts of the one-mode dictionaries at grade two; checked on every
# verification of such a dictionary when no efficiency is zero.
LEDGER_CONTRACT: dict[Scheme, dict[ConstraintGroup, int]] = {
    Scheme.ACTIVE: {
        ConstraintGroup.OBSERVATION: 16,
        ConstraintGroup.ALICE_CROSS: 12,
        ConstraintGroup.COMMUTING: 188,
        ConstraintGroup.COMMUTATION: 72,
        ConstraintGroup.REALNESS: 34,
        ConstraintGroup.PROJECTION: 320,
        ConstraintGroup.RELATION: 108,
        ConstraintGroup.PHOTON_TAIL: 16,
    },
    Scheme.PASSIVE: {
        ConstraintGroup.OBSERVATION: 18,
        ConstraintGroup.ALICE_CROSS: 14,
        ConstraintGroup.REALNESS: 36,
        ConstraintGroup.RELATION: 56,
        ConstraintGroup.PHOTON_TAIL: 17,
    },
}


def to_model(dto: ModelDTO) -> DetectorModel:
    """Build a detector model; the spatial-mode count is the number of table rows.

    Raises:
        ValueObjectError: On an unknown scheme name.
    """
    try:
        kind = Scheme(dto.scheme)
    except ValueError as e:
        raise ValueObjectError(f"Unknown detection scheme {dto.scheme!r}.") from e
    scheme = SchemeConfig(kind, len(dto.efficiencies))
    return DetectorModel.from_array(scheme, dto.efficiencies)


def model_label(model: DetectorModel) -> str:
    return ";".join(" ".join(f"{v:g}" for v in row) for row in model.efficiencies)


def to_params(dto: ChannelDTO) -> ChannelParams:
    return ChannelParams(dto.omega, dto.loss, dto.multi_photon, dto.n_resend)


def to_statistics(dto: StatisticsDTO) -> ObservedStatistics:
    """Parse statistics rows.

    Raises:
        ObservationError: On unknown labels, duplicates or broken normalization.
    """
    table: dict[tuple[AliceOutcome, Outcome], float] = {}
    try:
        for x, y, p in dto.rows:
            key = (AliceOutcome(x), Outcome(y))
            if key in table:
                raise ObservationError(f"Duplicate statistics entry {x},{y}.")
            table[key] = float(p)
        return ObservedStatistics(Scheme(dto.scheme), table, dto.squashed)
    except (ValueError, ValueObjectError) as e:
        raise ObservationError(str(e)) from e


def statistics_dto(observed: ObservedStatistics) -> StatisticsDTO:
    rows = tuple(
        (str(x), str(y), observed.p(x, y)) for x in AliceOutcome for y in observed.outcomes
    )
    active = observed.scheme is Scheme.ACTIVE and not observed.squashed
    passive = observed.scheme is Scheme.PASSIVE and not observed.squashed
    return StatisticsDTO(
        scheme=str(observed.scheme),
        rows=rows,
        squashed=observed.squashed,
        double_click=observed.double_click() if active else None,
        effective_error=observed.effective_error() if active else None,
        cross_click=observed.cross_click() if passive else None,
    )


@lru_cache(maxsize=64)
def _bound_tables(
    model: DetectorModel, factory: SolverBackendFactory
) -> dict[WitnessKind, PhotonBoundTable]:
    backend = factory()
    grade = 3 if model.scheme.scheme is Scheme.ACTIVE else 2
    return {
        kind: bound_table(kind, model, grade, minimize=backend.minimize_expectation)
        for kind in witness_kinds(model.scheme.scheme)
    }


@dataclass(frozen=True, eq=False)
class PipelineResult:
    verdict: FeasibilityVerdict
    problem: EVMProblem
    dictionary: OperatorDictionary
    common_transmittance: float


def run_pipeline(
    observed: ObservedStatistics,
    model: DetectorModel,
    settings: PipelineDTO,
    backend: SolverBackend,
    factory: SolverBackendFactory,
) -> PipelineResult:
    """Renormalize, build the dictionary and tails, compile and verify.

    Raises:
        DomainError: On model, cutoff or statistics mismatches.
    """
    eta0 = 1.0
    if settings.renormalize:
        renormalized = renormalize(model)
        model, eta0 = renormalized.model, renormalized.common_transmittance
    space = enumerate_basis(ModeSet(model.scheme.spatial_mode_count), settings.cutoff)
    dictionary = build_dictionary(
        model.scheme,
        model,
        space,
        max_ideal_grade=settings.max_ideal_grade,
        extended_pair_set=settings.extended_pair_set,
    )
    tails = ()
    if dictionary.max_ideal_grade >= 0:
        tails = photon_tail_bounds(
            _bound_tables(model, factory), observed, dictionary.max_ideal_grade
        )
    problem = compile_problem(dictionary, observed, tails)
    verdict = verify(problem, backend)
    return PipelineResult(verdict, problem, dictionary, eta0)


def ledger_drift(result: PipelineResult) -> list[tuple[ConstraintGroup, int, int]]:
    """Contract groups whose statement count differs from the one-mode contract.

    Models with a zero efficiency have vanishing POVM elements and are skipped.
    """
    d = result.dictionary
    if d.scheme.spatial_mode_count != 1 or d.max_ideal_grade != 2 or d.extended_pair_set:
        return []
    if min(min(row) for row in d.model.efficiencies) <= 0.0:
        return []
    contract = LEDGER_CONTRACT[d.scheme.scheme]
    ledger = result.problem.ledger
    return [(g, n, ledger.get(g, 0)) for g, n in contract.items() if ledger.get(g, 0) != n]


def constraint_rows(problem: EVMProblem) -> tuple[ConstraintRowDTO, ...]:
    out: list[ConstraintRowDTO] = []
    for con in (*problem.equalities, *problem.inequalities):
        terms = tuple(
            (*problem.entries[e], "im" if problem.imaginary[e] else "re", c)
            for e, c in sorted(con.terms.items())
        )
        out.append(ConstraintRowDTO(str(con.group), con.label, str(con.relation), con.rhs, terms))
    return tuple(out)


def verdict_dto(
    verdict: FeasibilityVerdict,
    *,
    problem: EVMProblem | None = None,
    common_transmittance: float = 1.0,
    dump_problem: bool = False,
) -> VerdictDTO:
    operators: tuple[str, ...] = ()
    if problem is not None and problem.dictionary is not None:
        operators = tuple(op.name for op in problem.dictionary.bob_ops)
    return VerdictDTO(
        verdict=str(verdict.verdict),
        margin=verdict.margin,
        status=str(verdict.status),
        stage=verdict.stage,
        certificate=verdict.certificate,
        timings=dict(verdict.timings),
        diagnostics=verdict.diagnostics,
        common_transmittance=common_transmittance,
        ledger={str(g): n for g, n in problem.ledger.items()} if problem else {},
        dropped_blocks=problem.dropped_blocks if problem else (),
        operators=operators,
        witness=verdict.chi,
        constraints=constraint_rows(problem) if problem and dump_problem else (),
    )


@dataclass(frozen=True)
class PointTask:
    """One grid point: simulate at ``params`` with ``model``, then verify.

    ``baseline`` optionally adds a second verdict at the same point:
    ``"squash"`` or ``"measurement-only"``.
    """

    model: DetectorModel
    params: ChannelParams
    settings: PipelineDTO
    factory: SolverBackendFactory
    baseline: str | None = None


@dataclass(frozen=True)
class PointOutcome:
    verdict: Verdict
    margin: float | None
    diagnostics: str = ""
    baseline: Verdict | None = None
    baseline_margin: float | None = None


def evaluate_point(task: PointTask) -> PointOutcome:
    backend = task.factory()
    observed = simulate_statistics(task.params, task.model)
    ours = run_pipeline(observed, task.model, task.settings, backend, task.factory).verdict
    match task.baseline:
        case "squash":
            other = verify_squashed(squash_statistics(observed), backend)
        case "measurement-only":
            settings = replace(task.settings, max_ideal_grade=-1)
            other = run_pipeline(observed, task.model, settings, backend, task.factory).verdict
        case _:
            other = None
    return PointOutcome(
        ours.verdict,
        ours.margin,
        ours.diagnostics,
        other.verdict if other else None,
        other.margin if other else None,
    )


async def dispatch[T, R](worker: Callable[[T], R], tasks: Sequence[T], threads: int) -> list[R]:
    """Run ``worker`` over ``tasks``; results keep the task order."""
    if threads <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    logger.debug(
        {
            "event": "pool_dispatch",
            "worker": worker.__name__,
            "tasks": len(tasks),
            "threads": threads,
        }
    )
    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [loop.run_in_executor(pool, worker, t) for t in tasks]
        return list(await asyncio.gather(*futures))
