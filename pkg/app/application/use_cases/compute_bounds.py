from __future__ import annotations

from typing import override

from app.application.dto import BoundRowDTO, BoundsInputDTO, BoundsTableDTO
from app.application.ports.presenters import Presenter
from app.application.use_cases.base import VerifierUseCase
from app.application.use_cases.pipeline import model_label, to_model
from app.config.logging import get_logger
from app.domain.services.photon_bounds import bound_table, witness_kinds


class ComputeBoundsUseCase(VerifierUseCase[BoundsInputDTO, BoundsTableDTO]):
    """Photon-number bound tables d/e/c_{n,min} for a list of models."""

    logger = get_logger(__name__)

    @override
    async def run(self, dto: BoundsInputDTO, presenter: Presenter[BoundsTableDTO]) -> None:
        backend = self._factory()
        rows: list[BoundRowDTO] = []
        monotone: dict[str, bool] = {}
        plateau: dict[str, int | None] = {}
        failed = False

        for model_dto in dto.models:
            model = to_model(model_dto)
            label = model_dto.label or model_label(model)
            for kind in witness_kinds(model.scheme.scheme):
                table = bound_table(
                    kind, model, dto.max_grade, minimize=backend.minimize_expectation, ppt=dto.ppt
                )
                key = f"{kind}:{label}"
                monotone[key] = table.is_monotone()
                plateau[key] = table.plateau_grade()
                for row in table.rows:
                    failed |= not row.status.usable
                    rows.append(BoundRowDTO(row.n, str(kind), label, row.value, str(row.status)))
                if not monotone[key]:
                    self.logger.warning(
                        {"event": "bounds_not_monotone", "kind": str(kind), "model": label}
                    )

        result = BoundsTableDTO(tuple(rows), monotone, plateau)
        if failed:
            presenter.inconclusive(result)
        else:
            presenter.ok(result)
        self.logger.info(
            {
                "event": "bounds_computed",
                "use_case": self.__class__.__name__,
                "models": len(dto.models),
                "max_grade": dto.max_grade,
                "rows": len(rows),
                "failed": failed,
            }
        )
