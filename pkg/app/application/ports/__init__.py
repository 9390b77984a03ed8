from app.application.ports.presenters import Presenter, State
from app.application.ports.services import SolverBackend, SolverBackendFactory
from app.domain.value_objects import SolverStatus

__all__ = [
    "Presenter",
    "SolverBackend",
    "SolverBackendFactory",
    "SolverStatus",
    "State",
]
