from __future__ import annotations

from typing import override

from app.application.dto import SimulateInputDTO, StatisticsDTO
from app.application.ports.presenters import Presenter
from app.application.use_cases.base import VerifierUseCase
from app.application.use_cases.pipeline import statistics_dto, to_model, to_params
from app.config.logging import get_logger
from app.domain.services.channel import simulate_statistics


class SimulateStatisticsUseCase(VerifierUseCase[SimulateInputDTO, StatisticsDTO]):
    """Exact toy-channel statistics for one detector model."""

    logger = get_logger(__name__)

    @override
    async def run(self, dto: SimulateInputDTO, presenter: Presenter[StatisticsDTO]) -> None:
        model = to_model(dto.model)
        params = to_params(dto.channel)
        observed = simulate_statistics(params, model)

        presenter.ok(statistics_dto(observed))
        self.logger.info(
            {
                "event": "statistics_simulated",
                "use_case": self.__class__.__name__,
                "scheme": str(model.scheme.scheme),
                "spatial_modes": model.scheme.spatial_mode_count,
                "omega": params.omega,
                "loss": params.loss,
                "multi_photon": params.multi_photon,
                "n_resend": params.n_resend,
            }
        )
