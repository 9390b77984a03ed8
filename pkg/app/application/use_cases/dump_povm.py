from __future__ import annotations

from typing import override

from app.application.dto import PovmDumpDTO, PovmDumpInputDTO
from app.application.ports.presenters import Presenter
from app.application.use_cases.base import VerifierUseCase
from app.application.use_cases.pipeline import to_model
from app.config.logging import get_logger
from app.domain.services.fockspace import enumerate_basis
from app.domain.services.povm import build_povm, verify_povm_relations
from app.domain.value_objects import ModeSet


class DumpPovmUseCase(VerifierUseCase[PovmDumpInputDTO, PovmDumpDTO]):
    """POVM elements on the truncated space with their relation checks."""

    logger = get_logger(__name__)

    @override
    async def run(self, dto: PovmDumpInputDTO, presenter: Presenter[PovmDumpDTO]) -> None:
        model = to_model(dto.model)
        space = enumerate_basis(ModeSet(model.scheme.spatial_mode_count), dto.cutoff)
        povm = build_povm(model, space)
        report = verify_povm_relations(povm)

        presenter.ok(
            PovmDumpDTO(
                scheme=str(model.scheme.scheme),
                basis=tuple(s.occupations for s in space.basis),
                elements={str(y): povm[y].matrix for y in povm.labels},
                relations=dict(report.checks),
                relations_ok=report.ok,
            )
        )
        if not report.ok:
            self.logger.warning(
                {
                    "event": "povm_relation_violated",
                    "violations": len(report.violations),
                    "worst": min(report.violations.values()),
                }
            )
        self.logger.info(
            {
                "event": "povm_dumped",
                "use_case": self.__class__.__name__,
                "dim": space.dim,
                "elements": len(povm.labels),
            }
        )
