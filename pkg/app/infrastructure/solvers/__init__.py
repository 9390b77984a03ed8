from app.infrastructure.solvers.cvxpy_backend import CvxpyBackend, CvxpyBackendFactory

__all__ = ["CvxpyBackend", "CvxpyBackendFactory"]
