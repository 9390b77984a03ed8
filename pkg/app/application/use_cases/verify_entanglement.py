from __future__ import annotations

from typing import override

from app.application.dto import VerdictDTO, VerifyInputDTO
from app.application.exceptions import LedgerMismatchError
from app.application.ports.presenters import Presenter
from app.application.use_cases.base import VerifierUseCase
from app.application.use_cases.pipeline import (
    ledger_drift,
    run_pipeline,
    to_model,
    to_statistics,
    verdict_dto,
)
from app.config.logging import get_logger
from app.domain.value_objects import Verdict


class VerifyEntanglementUseCase(VerifierUseCase[VerifyInputDTO, VerdictDTO]):
    """Verify entanglement from observed statistics and a detector model."""

    logger = get_logger(__name__)

    @override
    async def run(self, dto: VerifyInputDTO, presenter: Presenter[VerdictDTO]) -> None:
        model = to_model(dto.model)
        observed = to_statistics(dto.statistics)
        result = run_pipeline(observed, model, dto.pipeline, self._factory(), self._factory)
        problem = result.problem

        for group, expected, got in ledger_drift(result):
            if dto.strict_ledger:
                raise LedgerMismatchError(f"{group}: expected {expected} statements, got {got}.")
            self.logger.warning(
                {"event": "ledger_drift", "group": str(group), "expected": expected, "got": got}
            )
        for block in problem.dropped_blocks:
            self.logger.info({"event": "block_not_decomposable", "block": block})

        verdict = result.verdict
        out = verdict_dto(
            verdict,
            problem=problem,
            common_transmittance=result.common_transmittance,
            dump_problem=dto.dump_problem,
        )
        if verdict.verdict is Verdict.INCONCLUSIVE:
            presenter.inconclusive(out)
            self.logger.warning(
                {
                    "event": "solver_inconclusive",
                    "use_case": self.__class__.__name__,
                    "status": str(verdict.status),
                    "t_star": verdict.margin,
                    "diagnostics": verdict.diagnostics,
                }
            )
        else:
            presenter.ok(out)
        self.logger.info(
            {
                "event": "verdict",
                "use_case": self.__class__.__name__,
                "scheme": str(model.scheme.scheme),
                "verdict": str(verdict.verdict),
                "t_star": verdict.margin,
                "certificate": verdict.certificate,
                "stage": verdict.stage,
                "evm_dim": problem.dim,
                "equalities": len(problem.equalities),
                "inequalities": len(problem.inequalities),
            }
        )
