from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Literal, override

import cvxpy as cp
import numpy as np
import numpy.typing as npt
from scipy import sparse

from app.application.exceptions import SolverError
from app.application.ports.services import SolverBackend
from app.config import BaseConfig
from app.domain.services.evm import EVMProblem
from app.domain.services.verdicts import Face, MarginSolution
from app.domain.value_objects import SolverStatus

type SolverName = Literal["CLARABEL", "SCS"]

_STATUS: dict[str, SolverStatus] = {
    cp.OPTIMAL: SolverStatus.OPTIMAL,
    cp.OPTIMAL_INACCURATE: SolverStatus.INACCURATE,
    cp.INFEASIBLE: SolverStatus.INFEASIBLE,
    cp.INFEASIBLE_INACCURATE: SolverStatus.INFEASIBLE,
    cp.UNBOUNDED: SolverStatus.FAILED,
    cp.UNBOUNDED_INACCURATE: SolverStatus.FAILED,
}


@dataclass(frozen=True)
class _Selection:
    """Sparse maps from vec(Re X), vec(Im X) (column-major) to the EVM unknowns."""

    real: sparse.csr_matrix
    imag: sparse.csr_matrix
    # Entries forced to zero by their type or by elimination.
    zero_real: sparse.csr_matrix
    zero_imag: sparse.csr_matrix


def _selector(rows: list[int], cols: list[int], shape: tuple[int, int]) -> sparse.csr_matrix:
    return sparse.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=shape)


def _selection(problem: EVMProblem) -> _Selection:
    n, m = problem.dim, len(problem.entries)
    re_rows, re_cols, im_rows, im_cols = [], [], [], []
    zre: list[int] = []
    zim: list[int] = []
    for e, (r, c) in enumerate(problem.entries):
        flat = r + c * n
        if e in problem.eliminated:
            zre.append(flat)
            if r != c:
                zim.append(flat)
            continue
        if problem.imaginary[e]:
            im_rows.append(e)
            im_cols.append(flat)
            zre.append(flat)
        else:
            re_rows.append(e)
            re_cols.append(flat)
            if r != c:
                zim.append(flat)
    return _Selection(
        real=_selector(re_rows, re_cols, (m, n * n)),
        imag=_selector(im_rows, im_cols, (m, n * n)),
        zero_real=_selector(list(range(len(zre))), zre, (len(zre), n * n)),
        zero_imag=_selector(list(range(len(zim))), zim, (len(zim), n * n)),
    )


def _hermitian_part(m: npt.ArrayLike | None, n: int) -> npt.NDArray[np.complex128] | None:
    """Dual matrix of an n x n Hermitian cone, also from its real 2n x 2n embedding."""
    if m is None:
        return None
    a = np.asarray(m, dtype=np.complex128)
    if a.shape == (2 * n, 2 * n):
        a = a[:n, :n] + a[n:, n:] + 1j * (a[n:, :n] - a[:n, n:])
    if a.shape != (n, n):
        return None
    return (a + a.conj().T) / 2


def _vector(v: npt.ArrayLike | None) -> npt.NDArray[np.float64] | None:
    return None if v is None else np.atleast_1d(np.asarray(v, dtype=float))


class CvxpyBackend(SolverBackend):
    """Margin and witness-minimization programs modelled with cvxpy.

    EVM entries are read off a Hermitian matrix variable; the unknowns are
    boxed to [-1, 1], which every EVM of normalized operators satisfies.
    """

    def __init__(
        self, solver: SolverName = "CLARABEL", tolerance: float = 1e-8, max_iters: int = 500
    ) -> None:
        """Bind solver options.

        Raises:
            SolverError: If the requested solver is not installed.
        """
        if solver not in cp.installed_solvers():
            raise SolverError(f"Solver {solver} is not installed.")
        self._solver = solver
        self._tolerance = tolerance
        self._max_iters = max_iters

    def _options(self) -> dict[str, float | int]:
        if self._solver == "SCS":
            return {
                "eps_abs": self._tolerance,
                "eps_rel": self._tolerance,
                "max_iters": self._max_iters * 20,
            }
        return {
            "tol_gap_abs": self._tolerance,
            "tol_gap_rel": self._tolerance,
            "tol_feas": self._tolerance,
            "max_iter": self._max_iters,
        }

    def _solve(self, program: cp.Problem) -> tuple[SolverStatus, str, float]:
        start = time.perf_counter()
        try:
            program.solve(solver=self._solver, **self._options())
        except cp.error.SolverError as e:
            return SolverStatus.FAILED, str(e), time.perf_counter() - start
        status = _STATUS.get(program.status, SolverStatus.FAILED)
        message = "" if status is SolverStatus.OPTIMAL else f"{self._solver}: {program.status}"
        return status, message, time.perf_counter() - start

    @override
    def maximize_margin(self, problem: EVMProblem, face: Face | None = None) -> MarginSolution:
        n = problem.dim
        t = cp.Variable()
        constraints: list[cp.Constraint] = []
        if face is None:
            chi = cp.Variable((n, n), hermitian=True)
            chi_cone = chi - t * np.eye(n) >> 0
            constraints.append(chi_cone)
        else:
            w = face.chi_range
            k = w.shape[1]
            if k == 0:
                return MarginSolution(SolverStatus.FAILED, message="face has an empty range")
            inner = cp.Variable((k, k), hermitian=True)
            chi = w @ inner @ w.conj().T
            chi_cone = inner - t * np.eye(k) >> 0
            constraints.append(chi_cone)

        sel = _selection(problem)
        re = cp.reshape(cp.real(chi), (n * n,), order="F")
        im = cp.reshape(cp.imag(chi), (n * n,), order="F")
        u = sel.real @ re + sel.imag @ im
        if sel.zero_real.shape[0]:
            constraints.append(sel.zero_real @ re == 0)
        if sel.zero_imag.shape[0]:
            constraints.append(sel.zero_imag @ im == 0)
        constraints += [u <= 1, u >= -1]

        gamma = cp.partial_transpose(chi, dims=list(problem.split), axis=0)
        if face is None:
            gamma_cone = gamma - t * np.eye(n) >> 0
        else:
            if face.gamma_kernel.shape[1]:
                constraints.append(gamma @ face.gamma_kernel == 0)
            v = face.gamma_range
            gamma_cone = v.conj().T @ gamma @ v - t * np.eye(v.shape[1]) >> 0
        constraints.append(gamma_cone)

        a, b, c, d = problem.matrices()
        eq = a @ u == b if a.shape[0] else None
        ineq = c @ u >= d if c.shape[0] else None
        constraints += [con for con in (eq, ineq) if con is not None]

        program = cp.Problem(cp.Maximize(t), constraints)
        status, message, elapsed = self._solve(program)
        if u.value is None or t.value is None:
            return MarginSolution(status, solve_time=elapsed, message=message or "no solution")
        return MarginSolution(
            status=status,
            t=float(t.value),
            chi=problem.entry_matrix(u.value),
            z_chi=_hermitian_part(chi_cone.dual_value, n) if face is None else None,
            z_gamma=_hermitian_part(gamma_cone.dual_value, n) if face is None else None,
            y=_vector(eq.dual_value) if eq is not None else np.zeros(0),
            z=_vector(ineq.dual_value) if ineq is not None else np.zeros(0),
            solve_time=elapsed,
            message=message,
        )

    @override
    def minimize_expectation(
        self, witness: npt.NDArray[np.float64], dims: tuple[int, int], ppt: bool
    ) -> tuple[float, SolverStatus]:
        w = np.asarray(witness, dtype=float)
        n = w.shape[0]
        rho = cp.Variable((n, n), symmetric=True)
        constraints = [rho >> 0, cp.trace(rho) == 1]
        if ppt:
            constraints.append(cp.partial_transpose(rho, dims=list(dims), axis=0) >> 0)
        program = cp.Problem(cp.Minimize(cp.trace(w @ rho)), constraints)
        status, _, _ = self._solve(program)
        if program.value is None or not np.isfinite(program.value):
            if status is SolverStatus.OPTIMAL:
                status = SolverStatus.FAILED
            return float("nan"), status
        return float(program.value), status

    def __repr__(self) -> str:
        return f"cvxpy/{self._solver}(tol={self._tolerance:g})"


@dataclass(frozen=True)
class CvxpyBackendFactory:
    """Picklable backend constructor; hashable so bound tables can be cached per factory."""

    solver: SolverName = "CLARABEL"
    tolerance: float = 1e-8
    max_iters: int = 500

    @classmethod
    def from_settings(
        cls, settings: BaseConfig, tolerance: float | None = None
    ) -> CvxpyBackendFactory:
        return cls(
            solver=settings.EVM_VERIFIER_SOLVER,
            tolerance=tolerance or settings.EVM_VERIFIER_SOLVER_TOLERANCE,
            max_iters=settings.EVM_VERIFIER_SOLVER_MAX_ITERS,
        )

    def __call__(self) -> CvxpyBackend:
        return CvxpyBackend(self.solver, self.tolerance, self.max_iters)

    def __repr__(self) -> str:
        return f"cvxpy/{self.solver}(tol={self.tolerance:g})"
