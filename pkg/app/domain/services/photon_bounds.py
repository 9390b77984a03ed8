from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from math import sqrt

import numpy as np
import numpy.typing as npt

from app.domain.exceptions import DetectorModelError, FockSpaceError, PhotonBoundError
from app.domain.services.fockspace import compositions
from app.domain.services.povm import PovmSet, build_povm, pattern_block
from app.domain.value_objects import (
    AliceOutcome,
    DetectorModel,
    FockSpace,
    ObservedStatistics,
    Outcome,
    Polarization,
    Scheme,
    SchemeConfig,
    SolverStatus,
    WitnessKind,
)
from app.domain.value_objects.constants import BOUND_MONOTONICITY_SLACK, CC_PLATEAU_GAP

# (witness block, (alice dim, bob dim), ppt) -> (minimum, status)
type ExpectationMinimizer = Callable[
    [npt.NDArray[np.float64], tuple[int, int], bool], tuple[float, SolverStatus]
]

_S = 1 / sqrt(2)
_ALICE_STATES: dict[AliceOutcome, npt.NDArray[np.float64]] = {
    AliceOutcome.H: np.array([1.0, 0.0]),
    AliceOutcome.V: np.array([0.0, 1.0]),
    AliceOutcome.D: np.array([_S, _S]),
    AliceOutcome.A: np.array([_S, -_S]),
}
_ERROR: dict[AliceOutcome, Outcome] = {
    AliceOutcome.H: Outcome.V,
    AliceOutcome.V: Outcome.H,
    AliceOutcome.D: Outcome.A,
    AliceOutcome.A: Outcome.D,
}
_DOUBLE: dict[Polarization, Outcome] = {Polarization.HV: Outcome.HV, Polarization.DA: Outcome.DA}


def alice_projector(x: AliceOutcome) -> npt.NDArray[np.float64]:
    """|x><x| on Alice's qubit."""
    v = _ALICE_STATES[x]
    return np.outer(v, v)


@dataclass(frozen=True, eq=False)
class WitnessTerm:
    alice: npt.NDArray[np.float64]
    label: Outcome
    weight: float


def witness_kinds(scheme: Scheme) -> tuple[WitnessKind, ...]:
    return (WitnessKind.DC, WitnessKind.EE) if scheme is Scheme.ACTIVE else (WitnessKind.CC,)


def witness_terms(kind: WitnessKind, scheme: Scheme) -> tuple[WitnessTerm, ...]:
    """Expand a witness into weighted Alice (x) POVM-element products.

    F_DC = 1/2 I (x) M_HV + 1/2 I (x) M_DA,
    F_EE = 1/2 sum_x (|x><x|/2) (x) (M_err(x) + 1/2 M_double(x)),
    F_CC = I (x) M_CC.

    Raises:
        DetectorModelError: If ``kind`` does not belong to ``scheme``.
    """
    if kind not in witness_kinds(scheme):
        raise DetectorModelError(f"{kind} witness is not defined for the {scheme} scheme.")
    eye = np.eye(2)
    match kind:
        case WitnessKind.DC:
            return (WitnessTerm(eye, Outcome.HV, 0.5), WitnessTerm(eye, Outcome.DA, 0.5))
        case WitnessKind.CC:
            return (WitnessTerm(eye, Outcome.CC, 1.0),)
    terms: list[WitnessTerm] = []
    for x in AliceOutcome:
        proj = alice_projector(x)
        terms.append(WitnessTerm(proj, _ERROR[x], 0.25))
        terms.append(WitnessTerm(proj, _DOUBLE[x.basis], 0.125))
    return tuple(terms)


def alice_independent(kind: WitnessKind) -> bool:
    return kind is not WitnessKind.EE


@dataclass(frozen=True, eq=False)
class WitnessOperator:
    """Joint Alice (x) Bob witness on the full truncated space, Alice index outermost."""

    kind: WitnessKind
    terms: tuple[WitnessTerm, ...]
    matrix: npt.NDArray[np.float64] = field(repr=False)

    def expectation(self, rho: npt.ArrayLike) -> float:
        return float(np.real(np.trace(np.asarray(rho) @ self.matrix)))


def build_witnesses(
    scheme: SchemeConfig,
    model: DetectorModel,
    space: FockSpace,
    *,
    povm: PovmSet | None = None,
) -> dict[WitnessKind, WitnessOperator]:
    """Return F_DC and F_EE (active) or F_CC (passive) as joint operators."""
    if model.scheme != scheme:
        raise DetectorModelError("Model and scheme disagree.")
    povm = povm or build_povm(model, space)
    out: dict[WitnessKind, WitnessOperator] = {}
    for kind in witness_kinds(scheme.scheme):
        terms = witness_terms(kind, scheme.scheme)
        matrix = sum(
            t.weight * np.kron(t.alice, povm[t.label].matrix.real) for t in terms
        )
        out[kind] = WitnessOperator(kind, terms, np.asarray(matrix))
    return out


def witness_block(
    kind: WitnessKind, model: DetectorModel, pattern: tuple[int, ...]
) -> npt.NDArray[np.float64]:
    """Joint witness restricted to Bob's spatial occupation ``pattern``."""
    terms = witness_terms(kind, model.scheme.scheme)
    blocks: dict[Outcome, npt.NDArray[np.float64]] = {}
    out: npt.NDArray[np.float64] | None = None
    for t in terms:
        if t.label not in blocks:
            blocks[t.label] = pattern_block(model, t.label, pattern)
        term = t.weight * np.kron(t.alice, blocks[t.label])
        out = term if out is None else out + term
    assert out is not None
    return out


@dataclass(frozen=True)
class BoundRow:
    n: int
    value: float
    status: SolverStatus
    clamped: float = 0.0


def _trivially_zero(kind: WitnessKind, n: int) -> bool:
    return n == 0 or (n == 1 and kind is not WitnessKind.EE)


def min_witness_over_grade(
    kind: WitnessKind,
    n: int,
    model: DetectorModel,
    *,
    minimize: ExpectationMinimizer | None = None,
    ppt: bool = True,
) -> BoundRow:
    """Minimum of Tr(rho F) over real (PPT) states with Bob in the n-photon grade.

    The witness is block-diagonal in Bob's spatial pattern, so the minimum is
    taken pattern by pattern. DC and CC act trivially on Alice and reduce to
    the smallest eigenvalue of Bob's block; EE needs ``minimize``.

    Raises:
        FockSpaceError: If ``n`` is negative.
        PhotonBoundError: If an EE bound is requested without a minimizer.
    """
    if n < 0:
        raise FockSpaceError(f"Photon number must be non-negative, got {n}.")
    witness_terms(kind, model.scheme.scheme)
    if _trivially_zero(kind, n):
        return BoundRow(n, 0.0, SolverStatus.EXACT)

    patterns = list(compositions(n, model.scheme.spatial_mode_count))
    status = SolverStatus.EXACT
    values: list[float] = []
    if alice_independent(kind):
        for pattern in patterns:
            bob = witness_block(kind, model, pattern)
            values.append(float(np.linalg.eigvalsh(bob)[0]))
    else:
        if minimize is None:
            raise PhotonBoundError("Effective-error bounds need a conic solver.")
        status = SolverStatus.OPTIMAL
        for pattern in patterns:
            block = witness_block(kind, model, pattern)
            value, solved = minimize(block, (2, block.shape[0] // 2), ppt)
            if not solved.usable:
                status = solved
                continue
            values.append(value)
    raw = min(values) if values else float("nan")
    value = float(np.clip(raw, 0.0, 1.0)) if values else raw
    return BoundRow(n, value, status, abs(value - raw) if values else 0.0)


@dataclass(frozen=True, eq=False)
class PhotonBoundTable:
    """d/e/c_{n,min} rows for one witness and one detector model."""

    kind: WitnessKind
    model: DetectorModel
    rows: tuple[BoundRow, ...]

    @property
    def max_grade(self) -> int:
        return max((r.n for r in self.rows), default=-1)

    def row(self, n: int) -> BoundRow:
        for r in self.rows:
            if r.n == n:
                return r
        raise PhotonBoundError(f"{self.kind} table has no row for n = {n}.")

    def value(self, n: int) -> float:
        return self.row(n).value

    def is_monotone(self, slack: float = BOUND_MONOTONICITY_SLACK) -> bool:
        ordered = sorted(self.rows, key=lambda r: r.n)
        return all(b.value >= a.value - slack for a, b in zip(ordered, ordered[1:]))

    def plateau_grade(self, gap: float = CC_PLATEAU_GAP) -> int | None:
        """Smallest n whose value is within ``gap`` of one."""
        for r in sorted(self.rows, key=lambda r: r.n):
            if r.value >= 1.0 - gap:
                return r.n
        return None


def bound_table(
    kind: WitnessKind,
    model: DetectorModel,
    max_grade: int,
    *,
    minimize: ExpectationMinimizer | None = None,
    ppt: bool = True,
) -> PhotonBoundTable:
    rows = tuple(
        min_witness_over_grade(kind, n, model, minimize=minimize, ppt=ppt)
        for n in range(max_grade + 1)
    )
    return PhotonBoundTable(kind, model, rows)


@dataclass(frozen=True)
class TailInequality:
    """observed >= sum_{g < tail_grade} <F^(g)> + (1 - sum_{g < tail_grade} p_g) * tail_min.

    ``p_g`` is the weight of Bob's g-photon subspace; the compiler writes both
    sums as linear forms in EVM entries.
    """

    kind: WitnessKind
    observed: float
    tail_grade: int
    tail_min: float

    @property
    def exact_grades(self) -> range:
        return range(self.tail_grade)


def observed_witness(kind: WitnessKind, observed: ObservedStatistics) -> float:
    match kind:
        case WitnessKind.DC:
            return observed.double_click()
        case WitnessKind.EE:
            return observed.effective_error()
        case WitnessKind.CC:
            return observed.cross_click()


def photon_tail_bounds(
    tables: Mapping[WitnessKind, PhotonBoundTable],
    observed: ObservedStatistics,
    max_ideal_grade: int,
) -> tuple[TailInequality, ...]:
    """Build the tail inequalities for the grades the dictionary leaves unresolved.

    The tail starts right above the highest ideal grade, at most at three
    photons (active) or two photons (passive).

    Raises:
        PhotonBoundError: If a required table or row is missing.
    """
    if max_ideal_grade < 0:
        return ()
    ceiling = 3 if observed.scheme is Scheme.ACTIVE else 2
    tail_grade = min(ceiling, max_ideal_grade + 1)
    out: list[TailInequality] = []
    for kind in witness_kinds(observed.scheme):
        try:
            table = tables[kind]
        except KeyError as e:
            raise PhotonBoundError(f"Missing {kind} bound table.") from e
        row = table.row(tail_grade)
        if not row.status.usable:
            raise PhotonBoundError(f"{kind} bound at n = {tail_grade} is {row.status}.")
        out.append(TailInequality(kind, observed_witness(kind, observed), tail_grade, row.value))
    return tuple(out)
