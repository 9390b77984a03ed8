from app.interface.cli.adapters.presenters import CliPresenter

__all__ = ["CliPresenter"]
