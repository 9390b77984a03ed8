from __future__ import annotations

from abc import ABC, abstractmethod
from logging import Logger
from typing import final

from app.application.dto.base import DTO
from app.application.exceptions import (
    ApplicationError,
    ConfigFileError,
    ExperimentSpecError,
)
from app.application.ports.presenters import Presenter
from app.application.ports.services import SolverBackendFactory
from app.config.logging import get_logger
from app.domain.exceptions import (
    DetectorModelError,
    DomainError,
    FockSpaceError,
    ValueObjectError,
)

# Errors caused by what the user configured rather than by the computation.
CONFIG_ERRORS: tuple[type[Exception], ...] = (
    ConfigFileError,
    ExperimentSpecError,
    DetectorModelError,
    FockSpaceError,
    ValueObjectError,
)


class UseCase[I: DTO, O: DTO](ABC):
    """Application use case contract."""

    async def execute(self, dto: I, presenter: Presenter[O]) -> None: ...


class VerifierUseCase[I: DTO, O: DTO](UseCase[I, O]):
    """Use case base that reports domain and application failures through the presenter."""

    logger: Logger = get_logger(__name__)

    def __init__(self, backend_factory: SolverBackendFactory) -> None:
        """Initialize with a factory building one solver backend per worker."""
        self._factory = backend_factory

    @final
    async def execute(self, dto: I, presenter: Presenter[O]) -> None:
        try:
            await self.run(dto, presenter)
        except CONFIG_ERRORS as e:
            presenter.config_error(str(e))
            self.logger.warning(
                {
                    "event": "config_rejected",
                    "use_case": self.__class__.__name__,
                    "error": type(e).__name__,
                    "reason": str(e),
                }
            )
        except (DomainError, ApplicationError) as e:
            presenter.error(str(e))
            self.logger.warning(
                {
                    "event": "use_case_failed",
                    "use_case": self.__class__.__name__,
                    "error": type(e).__name__,
                    "reason": str(e),
                }
            )

    @abstractmethod
    async def run(self, dto: I, presenter: Presenter[O]) -> None:
        """Execute the computation; errors are mapped by ``execute``."""
