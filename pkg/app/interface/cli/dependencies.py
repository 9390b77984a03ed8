from functools import lru_cache

from app.config import get_settings
from app.infrastructure.solvers import CvxpyBackendFactory


@lru_cache
def get_backend_factory(tolerance: float | None = None) -> CvxpyBackendFactory:
    """Return a cached backend factory built from settings; ``tolerance`` overrides them."""
    return CvxpyBackendFactory.from_settings(get_settings(), tolerance)
