from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Protocol, runtime_checkable

import numpy as np
import numpy.typing as npt

from app.domain.services.evm import EVMProblem
from app.domain.services.verdicts import Face, MarginSolution
from app.domain.value_objects import SolverStatus


class SolverBackend(ABC):
    """Conic solver with PSD cones, linear equalities and inequalities."""

    @abstractmethod
    def maximize_margin(self, problem: EVMProblem, face: Face | None = None) -> MarginSolution:
        """Solve max t s.t. chi - tI >= 0, chi^G - tI >= 0 and the problem's rows."""

    @abstractmethod
    def minimize_expectation(
        self, witness: npt.NDArray[np.float64], dims: tuple[int, int], ppt: bool
    ) -> tuple[float, SolverStatus]:
        """Minimize Tr(rho W) over real unit-trace PSD (and PPT) states on ``dims``."""


@runtime_checkable
class SolverBackendFactory(Protocol):
    """Picklable constructor of backends; every worker builds its own instance."""

    def __call__(self) -> SolverBackend: ...
