from __future__ import annotations

from app.application.dto.base import DTO
from app.application.ports.presenters import Presenter


class CliPresenter[D: DTO](Presenter[D]):
    """Presenter for command-line responses."""
