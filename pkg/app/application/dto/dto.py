from dataclasses import dataclass, field
from typing import Literal

import numpy as np
import numpy.typing as npt

from app.application.dto.base import DTO

type EfficiencyTable = tuple[tuple[float, ...], ...]
# (Alice outcome, Bob outcome, probability)
type StatisticsRow = tuple[str, str, float]


@dataclass(slots=True, frozen=True)
class ModelDTO(DTO):
    scheme: str
    efficiencies: EfficiencyTable
    label: str = ""


@dataclass(slots=True, frozen=True)
class ChannelDTO(DTO):
    omega: float
    loss: float = 0.0
    multi_photon: float = 0.0
    n_resend: int | None = None


@dataclass(slots=True, frozen=True)
class PipelineDTO(DTO):
    """Knobs shared by every use case that compiles and solves EVM problems."""

    cutoff: int = 2
    max_ideal_grade: int | None = None
    renormalize: bool = True
    extended_pair_set: bool = False
    threads: int = 1


@dataclass(slots=True, frozen=True)
class SimulateInputDTO(DTO):
    model: ModelDTO
    channel: ChannelDTO


@dataclass(slots=True, frozen=True)
class StatisticsDTO(DTO):
    scheme: str
    rows: tuple[StatisticsRow, ...]
    squashed: bool = False
    double_click: float | None = None
    effective_error: float | None = None
    cross_click: float | None = None


@dataclass(slots=True, frozen=True)
class BoundsInputDTO(DTO):
    models: tuple[ModelDTO, ...]
    max_grade: int = 8
    ppt: bool = True


@dataclass(slots=True, frozen=True)
class BoundRowDTO(DTO):
    n: int
    kind: str
    model: str
    value: float
    status: str


@dataclass(slots=True, frozen=True)
class BoundsTableDTO(DTO):
    rows: tuple[BoundRowDTO, ...]
    monotone: dict[str, bool] = field(default_factory=dict)
    plateau: dict[str, int | None] = field(default_factory=dict)


@dataclass(slots=True, frozen=True)
class VerifyInputDTO(DTO):
    model: ModelDTO
    statistics: StatisticsDTO
    pipeline: PipelineDTO = PipelineDTO()
    strict_ledger: bool = True
    dump_problem: bool = False


@dataclass(slots=True, frozen=True)
class ConstraintRowDTO(DTO):
    group: str
    label: str
    relation: str
    rhs: float
    # (row, column, "re" | "im", coefficient)
    terms: tuple[tuple[int, int, str, float], ...]


@dataclass(slots=True, frozen=True)
class VerdictDTO(DTO):
    verdict: str
    margin: float | None
    status: str
    stage: int
    certificate: float | None
    timings: dict[str, float]
    diagnostics: str = ""
    common_transmittance: float = 1.0
    ledger: dict[str, int] = field(default_factory=dict)
    dropped_blocks: tuple[str, ...] = ()
    operators: tuple[str, ...] = ()
    witness: npt.NDArray[np.complex128] | None = field(default=None, repr=False)
    constraints: tuple[ConstraintRowDTO, ...] = ()


@dataclass(slots=True, frozen=True)
class ScanInputDTO(DTO):
    """Threshold curves.

    ``eta-min``: for each omega, the smallest eta of the symmetric family that
    verifies entanglement. ``tradeoff``: passive one-mode model
    ``[[eta_h, eta_v, eta_d, eta_a]]``; for each eta_v in ``abscissae``, the
    smallest eta_a that verifies entanglement at ``channel``.
    """

    kind: Literal["eta-min", "tradeoff"]
    scheme: str
    channel: ChannelDTO
    abscissae: tuple[float, ...]
    spatial_modes: int = 1
    eta_range: tuple[float, float] = (0.0, 1.0)
    eta_h: float = 1.0
    eta_d: float = 1.0
    pipeline: PipelineDTO = PipelineDTO()


@dataclass(slots=True, frozen=True)
class CurvePointDTO(DTO):
    abscissa: float
    ordinate: float | None
    margin_above: float | None = None
    margin_below: float | None = None
    verdict_above: str = ""
    verdict_below: str = ""
    note: str = ""


@dataclass(slots=True, frozen=True)
class CurveDTO(DTO):
    kind: str
    abscissa: str
    ordinate: str
    points: tuple[CurvePointDTO, ...]
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def inconclusive(self) -> bool:
        return any("inconclusive" in p.note for p in self.points)


@dataclass(slots=True, frozen=True)
class SquashCompareInputDTO(DTO):
    """Grid comparison of the full method against a baseline.

    ``baseline = "squash"`` verifies squashed statistics with a qutrit model;
    ``baseline = "measurement-only"`` drops the ideal operators.
    """

    model: ModelDTO
    omegas: tuple[float, ...]
    multi_photons: tuple[float, ...]
    loss: float = 0.0
    n_resend: int | None = 2
    baseline: Literal["squash", "measurement-only"] = "squash"
    pipeline: PipelineDTO = PipelineDTO()


@dataclass(slots=True, frozen=True)
class GridPointDTO(DTO):
    omega: float
    multi_photon: float
    ours: str
    baseline: str
    margin_ours: float | None = None
    margin_baseline: float | None = None


@dataclass(slots=True, frozen=True)
class GridDTO(DTO):
    baseline: str
    points: tuple[GridPointDTO, ...]
    metadata: dict[str, str] = field(default_factory=dict)

    def verified(self, which: Literal["ours", "baseline"]) -> frozenset[tuple[float, float]]:
        return frozenset(
            (p.omega, p.multi_photon) for p in self.points if getattr(p, which) == "ENTANGLED"
        )

    @property
    def inconclusive(self) -> bool:
        return any("INCONCLUSIVE" in (p.ours, p.baseline) for p in self.points)


@dataclass(slots=True, frozen=True)
class PovmDumpInputDTO(DTO):
    model: ModelDTO
    cutoff: int = 2


@dataclass(slots=True, frozen=True)
class PovmDumpDTO(DTO):
    scheme: str
    basis: tuple[tuple[int, ...], ...]
    elements: dict[str, npt.NDArray[np.complex128]] = field(repr=False)
    relations: dict[str, float]
    relations_ok: bool


@dataclass(slots=True, frozen=True)
class ExperimentInputDTO(DTO):
    """One experiment of a batch spec; grids are already validated."""

    kind: Literal[
        "bounds-table", "eta-min-curve", "tradeoff-curve", "squash-compare", "verify-single"
    ]
    name: str
    model: ModelDTO
    channel: ChannelDTO = ChannelDTO(0.0)
    omegas: tuple[float, ...] = ()
    multi_photons: tuple[float, ...] = ()
    etas: tuple[float, ...] = ()
    eta_range: tuple[float, float] = (0.0, 1.0)
    max_grade: int = 8
    baseline: Literal["squash", "measurement-only"] = "squash"
    pipeline: PipelineDTO = PipelineDTO()


@dataclass(slots=True, frozen=True)
class ExperimentDTO(DTO):
    """Flat table behind one figure: metadata header, column names and rows."""

    kind: str
    name: str
    metadata: dict[str, str]
    columns: tuple[str, ...]
    rows: tuple[tuple[object, ...], ...]
    inconclusive: int = 0
