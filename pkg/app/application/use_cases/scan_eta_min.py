from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Literal, override

import numpy as np

from app.application.dto import CurveDTO, CurvePointDTO, PipelineDTO, ScanInputDTO
from app.application.exceptions import ExperimentSpecError, NonMonotoneScanError
from app.application.ports.presenters import Presenter
from app.application.ports.services import SolverBackendFactory
from app.application.use_cases.base import VerifierUseCase
from app.application.use_cases.pipeline import (
    PointTask,
    dispatch,
    evaluate_point,
    to_params,
)
from app.config.logging import get_logger
from app.domain.value_objects import (
    ChannelParams,
    DetectorModel,
    Scheme,
    SchemeConfig,
    Verdict,
)
from app.domain.value_objects.constants import (
    ETA_BISECTION_TOL,
    ETA_BRACKET,
    MONOTONICITY_SAMPLES,
)


@dataclass(frozen=True)
class EtaFamily:
    """Detector models parameterized by one efficiency.

    ``symmetric`` uses the symmetric per-mode shortcut. ``tradeoff`` is the passive
    one-mode model ``[[eta_h, eta_v, eta_d, eta]]``.
    """

    kind: Literal["symmetric", "tradeoff"]
    scheme: Scheme
    spatial_modes: int = 1
    eta_h: float = 1.0
    eta_v: float = 1.0
    eta_d: float = 1.0

    def model(self, eta: float) -> DetectorModel:
        config = SchemeConfig(self.scheme, self.spatial_modes)
        if self.kind == "symmetric":
            return DetectorModel.symmetric(config, eta)
        return DetectorModel.from_array(config, [[self.eta_h, self.eta_v, self.eta_d, eta]])


@dataclass(frozen=True)
class ThresholdJob:
    family: EtaFamily
    params: ChannelParams
    eta_range: tuple[float, float]
    settings: PipelineDTO
    factory: SolverBackendFactory


@dataclass(frozen=True)
class ThresholdResult:
    """``eta_min`` is ``None`` when no efficiency in range verifies entanglement."""

    eta_min: float | None
    margin_above: float | None = None
    margin_below: float | None = None
    verdict_above: Verdict | None = None
    verdict_below: Verdict | None = None
    notes: tuple[str, ...] = ()


def _verdict_at(job: ThresholdJob, eta: float) -> tuple[Verdict, float | None]:
    task = PointTask(job.family.model(eta), job.params, job.settings, job.factory)
    outcome = evaluate_point(task)
    return outcome.verdict, outcome.margin


def _check_monotone(etas: list[float], verdicts: list[Verdict]) -> None:
    """Raise on an ENTANGLED sample followed by a NOT_VERIFIED one; INCONCLUSIVE is skipped."""
    decided = [k for k, v in enumerate(verdicts) if v is not Verdict.INCONCLUSIVE]
    for low, high in zip(decided, decided[1:]):
        if verdicts[low] is Verdict.ENTANGLED and verdicts[high] is Verdict.NOT_VERIFIED:
            start = max(0, min(low - 1, len(etas) - 3))
            e, v = etas[start : start + 3], [str(x) for x in verdicts[start : start + 3]]
            raise NonMonotoneScanError((e[0], e[1], e[2]), (v[0], v[1], v[2]))


def find_eta_min(job: ThresholdJob) -> ThresholdResult:
    """Smallest eta in range whose statistics verify entanglement, to ETA_BISECTION_TOL.

    Verdicts are sampled at MONOTONICITY_SAMPLES points first; the bracket
    found there is bisected and the result re-validated ETA_BRACKET above and
    below.

    Raises:
        NonMonotoneScanError: If the samples are not monotone in eta.
    """
    lo, hi = job.eta_range
    etas = [float(e) for e in np.linspace(lo, hi, MONOTONICITY_SAMPLES)]
    verdicts = [_verdict_at(job, eta)[0] for eta in etas]
    notes: list[str] = []
    if Verdict.INCONCLUSIVE in verdicts:
        notes.append("inconclusive sample")
    _check_monotone(etas, verdicts)

    entangled = [k for k, v in enumerate(verdicts) if v is Verdict.ENTANGLED]
    if not entangled:
        return ThresholdResult(None, notes=(*notes, "not verifiable"))
    first = entangled[0]
    if first == 0:
        above, margin_above = _verdict_at(job, min(lo + ETA_BRACKET, hi))
        return ThresholdResult(lo, margin_above, None, above, None, tuple(notes))

    a, b = etas[first - 1], etas[first]
    while b - a > ETA_BISECTION_TOL:
        mid = 0.5 * (a + b)
        verdict, _ = _verdict_at(job, mid)
        if verdict is Verdict.INCONCLUSIVE:
            notes.append(f"inconclusive at eta={mid:.6f}")
        if verdict is Verdict.ENTANGLED:
            b = mid
        else:
            a = mid

    above, margin_above = _verdict_at(job, min(b + ETA_BRACKET, hi))
    below, margin_below = _verdict_at(job, max(b - ETA_BRACKET, lo))
    if above is not Verdict.ENTANGLED or below is Verdict.ENTANGLED:
        notes.append("bracket re-validation failed")
    return ThresholdResult(b, margin_above, margin_below, above, below, tuple(notes))


class ScanEtaMinUseCase(VerifierUseCase[ScanInputDTO, CurveDTO]):
    """Threshold curves: eta_min against omega, or eta_A against eta_V."""

    logger = get_logger(__name__)

    @override
    async def run(self, dto: ScanInputDTO, presenter: Presenter[CurveDTO]) -> None:
        jobs = self._jobs(dto)
        results = await dispatch(find_eta_min, jobs, dto.pipeline.threads)

        points: list[CurvePointDTO] = []
        for x, res in zip(dto.abscissae, results):
            points.append(
                CurvePointDTO(
                    abscissa=x,
                    ordinate=res.eta_min,
                    margin_above=res.margin_above,
                    margin_below=res.margin_below,
                    verdict_above=str(res.verdict_above or ""),
                    verdict_below=str(res.verdict_below or ""),
                    note="; ".join(res.notes),
                )
            )
            if "bracket re-validation failed" in res.notes:
                self.logger.warning({"event": "bracket_failed", "abscissa": x, "eta": res.eta_min})

        curve = CurveDTO(
            kind=dto.kind,
            abscissa="omega" if dto.kind == "eta-min" else "eta_V",
            ordinate="eta_min" if dto.kind == "eta-min" else "eta_A",
            points=tuple(points),
            metadata={
                "scheme": dto.scheme,
                "spatial_modes": str(dto.spatial_modes),
                "loss": f"{dto.channel.loss:g}",
                "multi_photon": f"{dto.channel.multi_photon:g}",
                "n_resend": "inf" if dto.channel.n_resend is None else str(dto.channel.n_resend),
                "cutoff": str(dto.pipeline.cutoff),
                "renormalize": str(dto.pipeline.renormalize).lower(),
            },
        )
        if curve.inconclusive:
            presenter.inconclusive(curve)
        else:
            presenter.ok(curve)
        self.logger.info(
            {
                "event": "scan_finished",
                "use_case": self.__class__.__name__,
                "kind": dto.kind,
                "points": len(points),
                "not_verifiable": sum(p.ordinate is None for p in points),
            }
        )

    def _jobs(self, dto: ScanInputDTO) -> list[ThresholdJob]:
        """Build one bisection job per abscissa.

        Raises:
            ExperimentSpecError: On an empty grid, a bad eta range or a
                trade-off scan outside the passive one-mode scheme.
        """
        lo, hi = dto.eta_range
        if not dto.abscissae:
            raise ExperimentSpecError("A scan needs at least one abscissa.")
        if not 0.0 <= lo < hi <= 1.0:
            raise ExperimentSpecError(f"Bad efficiency range {dto.eta_range}.")
        if dto.scheme not in Scheme:
            raise ExperimentSpecError(f"Unknown detection scheme {dto.scheme!r}.")
        scheme = Scheme(dto.scheme)
        base = to_params(dto.channel)
        if dto.kind == "eta-min":
            family = EtaFamily("symmetric", scheme, dto.spatial_modes)
            return [
                ThresholdJob(family, base.with_omega(w), (lo, hi), dto.pipeline, self._factory)
                for w in dto.abscissae
            ]
        if scheme is not Scheme.PASSIVE or dto.spatial_modes != 1:
            raise ExperimentSpecError("Trade-off curves use the passive one-mode model.")
        family = EtaFamily("tradeoff", scheme, 1, eta_h=dto.eta_h, eta_d=dto.eta_d)
        return [
            ThresholdJob(replace(family, eta_v=v), base, (lo, hi), dto.pipeline, self._factory)
            for v in dto.abscissae
        ]
