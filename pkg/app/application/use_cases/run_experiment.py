from __future__ import annotations

from typing import override

from app import __version__
from app.application.dto import (
    BoundsInputDTO,
    BoundsTableDTO,
    CurveDTO,
    ExperimentDTO,
    ExperimentInputDTO,
    GridDTO,
    ModelDTO,
    ScanInputDTO,
    SimulateInputDTO,
    SquashCompareInputDTO,
    StatisticsDTO,
    VerdictDTO,
    VerifyInputDTO,
)
from app.application.dto.base import DTO
from app.application.exceptions import ApplicationError, ExperimentSpecError
from app.application.ports.presenters import Presenter, State
from app.application.use_cases.base import VerifierUseCase
from app.application.use_cases.compute_bounds import ComputeBoundsUseCase
from app.application.use_cases.pipeline import model_label, to_model
from app.application.use_cases.scan_eta_min import ScanEtaMinUseCase
from app.application.use_cases.simulate_statistics import SimulateStatisticsUseCase
from app.application.use_cases.squash_compare import SquashCompareUseCase
from app.application.use_cases.verify_entanglement import VerifyEntanglementUseCase
from app.config.logging import get_logger
from app.domain.value_objects import DetectorModel, SchemeConfig

NOT_VERIFIABLE = "not-verifiable"


class _Collector[D: DTO](Presenter[D]):
    """Presenter that keeps the nested use case's result for the runner."""

    def unwrap(self) -> D:
        """Return the DTO, re-raising nested failures.

        Raises:
            ExperimentSpecError: If the nested use case rejected its input.
            ApplicationError: If the nested use case failed.
        """
        match self.state:
            case State.CONFIG_ERROR:
                raise ExperimentSpecError(str(self.response))
            case State.ERROR | None:
                raise ApplicationError(str(self.response))
        assert not isinstance(self.response, str)
        return self.response


def _opt(value: float | None) -> object:
    return "" if value is None else value


class RunExperimentUseCase(VerifierUseCase[ExperimentInputDTO, ExperimentDTO]):
    """Run one experiment of a batch spec and flatten it into a table."""

    logger = get_logger(__name__)

    @override
    async def run(self, dto: ExperimentInputDTO, presenter: Presenter[ExperimentDTO]) -> None:
        model = to_model(dto.model)
        metadata = {
            "experiment": dto.name,
            "kind": dto.kind,
            "scheme": dto.model.scheme,
            "model": dto.model.label or model_label(model),
            "cutoff": str(dto.pipeline.cutoff),
            "renormalize": str(dto.pipeline.renormalize).lower(),
            "backend": repr(self._factory),
            "version": __version__,
        }
        match dto.kind:
            case "bounds-table":
                columns, rows, inconclusive = await self._bounds(dto, model)
            case "eta-min-curve" | "tradeoff-curve":
                columns, rows, inconclusive = await self._curve(dto)
            case "squash-compare":
                columns, rows, inconclusive = await self._grid(dto)
            case "verify-single":
                columns, rows, inconclusive = await self._single(dto)
            case _:
                raise ExperimentSpecError(f"Unknown experiment kind {dto.kind!r}.")
        metadata |= self._grids(dto)

        result = ExperimentDTO(dto.kind, dto.name, metadata, columns, tuple(rows), inconclusive)
        if inconclusive:
            presenter.inconclusive(result)
        else:
            presenter.ok(result)
        self.logger.info(
            {
                "event": "experiment_finished",
                "use_case": self.__class__.__name__,
                "experiment": dto.name,
                "kind": dto.kind,
                "rows": len(rows),
                "inconclusive": inconclusive,
            }
        )

    @staticmethod
    def _grids(dto: ExperimentInputDTO) -> dict[str, str]:
        out: dict[str, str] = {
            "omega": " ".join(f"{w:g}" for w in dto.omegas) or f"{dto.channel.omega:g}",
            "multi_photon": " ".join(f"{p:g}" for p in dto.multi_photons)
            or f"{dto.channel.multi_photon:g}",
            "loss": f"{dto.channel.loss:g}",
            "n_resend": "inf" if dto.channel.n_resend is None else str(dto.channel.n_resend),
        }
        if dto.etas:
            out["eta"] = " ".join(f"{e:g}" for e in dto.etas)
        if dto.kind.endswith("curve"):
            out["eta_range"] = f"{dto.eta_range[0]:g} {dto.eta_range[1]:g}"
        return out

    async def _bounds(
        self, dto: ExperimentInputDTO, model: DetectorModel
    ) -> tuple[tuple[str, ...], list[tuple[object, ...]], int]:
        models = [dto.model]
        if dto.etas:
            config = SchemeConfig(model.scheme.scheme, model.scheme.spatial_mode_count)
            models = [
                ModelDTO(
                    dto.model.scheme,
                    DetectorModel.symmetric(config, eta).efficiencies,
                    f"{eta:g}",
                )
                for eta in dto.etas
            ]
        collector: _Collector[BoundsTableDTO] = _Collector()
        await ComputeBoundsUseCase(self._factory).execute(
            BoundsInputDTO(tuple(models), dto.max_grade), collector
        )
        table = collector.unwrap()
        rows = [(r.n, r.kind, r.model, r.value, r.status) for r in table.rows]
        failed = collector.state is State.INCONCLUSIVE
        return ("n", "kind", "model", "value", "status"), rows, int(failed)

    async def _curve(
        self, dto: ExperimentInputDTO
    ) -> tuple[tuple[str, ...], list[tuple[object, ...]], int]:
        tradeoff = dto.kind == "tradeoff-curve"
        row = dto.model.efficiencies[0]
        scan = ScanInputDTO(
            kind="tradeoff" if tradeoff else "eta-min",
            scheme=dto.model.scheme,
            channel=dto.channel,
            abscissae=dto.etas if tradeoff else dto.omegas,
            spatial_modes=len(dto.model.efficiencies),
            eta_range=dto.eta_range,
            eta_h=row[0],
            eta_d=row[2] if len(row) > 2 else 1.0,
            pipeline=dto.pipeline,
        )
        collector: _Collector[CurveDTO] = _Collector()
        await ScanEtaMinUseCase(self._factory).execute(scan, collector)
        curve = collector.unwrap()
        rows = [
            (
                p.abscissa,
                NOT_VERIFIABLE if p.ordinate is None else p.ordinate,
                _opt(p.margin_above),
                _opt(p.margin_below),
                p.verdict_above,
                p.verdict_below,
                p.note,
            )
            for p in curve.points
        ]
        columns = (
            curve.abscissa,
            curve.ordinate,
            "margin_above",
            "margin_below",
            "verdict_above",
            "verdict_below",
            "note",
        )
        return columns, rows, sum("inconclusive" in p.note for p in curve.points)

    async def _grid(
        self, dto: ExperimentInputDTO
    ) -> tuple[tuple[str, ...], list[tuple[object, ...]], int]:
        compare = SquashCompareInputDTO(
            model=dto.model,
            omegas=dto.omegas,
            multi_photons=dto.multi_photons,
            loss=dto.channel.loss,
            n_resend=dto.channel.n_resend,
            baseline=dto.baseline,
            pipeline=dto.pipeline,
        )
        collector: _Collector[GridDTO] = _Collector()
        await SquashCompareUseCase(self._factory).execute(compare, collector)
        grid = collector.unwrap()
        rows = [
            (
                p.omega,
                p.multi_photon,
                p.ours,
                p.baseline,
                _opt(p.margin_ours),
                _opt(p.margin_baseline),
            )
            for p in grid.points
        ]
        inconclusive = sum("INCONCLUSIVE" in (p.ours, p.baseline) for p in grid.points)
        columns = ("omega", "p", "ours", dto.baseline, "margin_ours", "margin_baseline")
        return columns, rows, inconclusive

    async def _single(
        self, dto: ExperimentInputDTO
    ) -> tuple[tuple[str, ...], list[tuple[object, ...]], int]:
        simulated: _Collector[StatisticsDTO] = _Collector()
        await SimulateStatisticsUseCase(self._factory).execute(
            SimulateInputDTO(dto.model, dto.channel), simulated
        )
        verified: _Collector[VerdictDTO] = _Collector()
        await VerifyEntanglementUseCase(self._factory).execute(
            VerifyInputDTO(dto.model, simulated.unwrap(), dto.pipeline), verified
        )
        v = verified.unwrap()
        rows = [
            (
                v.verdict,
                _opt(v.margin),
                _opt(v.certificate),
                v.stage,
                v.common_transmittance,
                v.diagnostics,
            )
        ]
        columns = (
            "verdict",
            "margin",
            "certificate",
            "stage",
            "common_transmittance",
            "diagnostics",
        )
        return columns, rows, int(verified.state is State.INCONCLUSIVE)
