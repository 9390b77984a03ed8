from typing import Final

from app.application.ports.presenters import Presenter, State

EXIT_OK: Final[int] = 0
EXIT_ERROR: Final[int] = 1
EXIT_INCONCLUSIVE: Final[int] = 2
EXIT_CONFIG_ERROR: Final[int] = 3

# Ranking used when several runs report into one exit code.
_SEVERITY: Final[dict[int, int]] = {
    EXIT_OK: 0,
    EXIT_INCONCLUSIVE: 1,
    EXIT_ERROR: 2,
    EXIT_CONFIG_ERROR: 3,
}


def exit_code_for_presenter(p: Presenter) -> int:
    match p.state:
        case State.OK:
            return EXIT_OK
        case State.INCONCLUSIVE:
            return EXIT_INCONCLUSIVE
        case State.CONFIG_ERROR:
            return EXIT_CONFIG_ERROR
        case State.ERROR:
            return EXIT_ERROR

    raise ValueError("Wrong presenter state")


def worst_exit_code(codes: list[int]) -> int:
    return max(codes, key=_SEVERITY.__getitem__, default=EXIT_OK)
