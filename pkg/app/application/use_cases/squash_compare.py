from __future__ import annotations

from typing import override

from app.application.dto import GridDTO, GridPointDTO, SquashCompareInputDTO
from app.application.exceptions import ExperimentSpecError
from app.application.ports.presenters import Presenter
from app.application.use_cases.base import VerifierUseCase
from app.application.use_cases.pipeline import (
    PointTask,
    dispatch,
    evaluate_point,
    model_label,
    to_model,
)
from app.config.logging import get_logger
from app.domain.value_objects import ChannelParams


class SquashCompareUseCase(VerifierUseCase[SquashCompareInputDTO, GridDTO]):
    """Verdict grids over (omega, p) for the full method and one baseline."""

    logger = get_logger(__name__)

    @override
    async def run(self, dto: SquashCompareInputDTO, presenter: Presenter[GridDTO]) -> None:
        if not dto.omegas or not dto.multi_photons:
            raise ExperimentSpecError("Comparison grids must not be empty.")
        model = to_model(dto.model)
        cells = [(w, p) for p in dto.multi_photons for w in dto.omegas]
        tasks = [
            PointTask(
                model,
                ChannelParams(w, dto.loss, p, dto.n_resend),
                dto.pipeline,
                self._factory,
                dto.baseline,
            )
            for w, p in cells
        ]
        outcomes = await dispatch(evaluate_point, tasks, dto.pipeline.threads)

        points = tuple(
            GridPointDTO(
                omega=w,
                multi_photon=p,
                ours=str(o.verdict),
                baseline=str(o.baseline),
                margin_ours=o.margin,
                margin_baseline=o.baseline_margin,
            )
            for (w, p), o in zip(cells, outcomes)
        )
        grid = GridDTO(
            baseline=dto.baseline,
            points=points,
            metadata={
                "scheme": dto.model.scheme,
                "model": dto.model.label or model_label(model),
                "loss": f"{dto.loss:g}",
                "n_resend": "inf" if dto.n_resend is None else str(dto.n_resend),
                "cutoff": str(dto.pipeline.cutoff),
            },
        )
        ours, baseline = grid.verified("ours"), grid.verified("baseline")
        if grid.inconclusive:
            presenter.inconclusive(grid)
        else:
            presenter.ok(grid)
        self.logger.info(
            {
                "event": "comparison_finished",
                "use_case": self.__class__.__name__,
                "baseline": dto.baseline,
                "points": len(points),
                "verified_ours": len(ours),
                "verified_baseline": len(baseline),
                "baseline_only": len(baseline - ours),
            }
        )
