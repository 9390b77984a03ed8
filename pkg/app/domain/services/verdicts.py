from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from itertools import product
from typing import Protocol

import numpy as np
import numpy.typing as npt

from app.domain.services.evm import EVMProblem, transpose_alice
from app.domain.value_objects import SolverStatus, Verdict
from app.domain.value_objects.constants import (
    CONE_TOL,
    ENTANGLED_MARGIN,
    FEASIBLE_MARGIN,
    NEAR_NULL_EIGENVALUE,
    REVALIDATION_TOL,
)

type ComplexArray = npt.NDArray[np.complex128]
type FloatArray = npt.NDArray[np.float64]

# Scales of (y, z) against trace-normalized PSD duals tried besides the optimal kink.
DUAL_SCALES: tuple[float, ...] = (0.5, 1.0, 2.0)


@dataclass(frozen=True, eq=False)
class Face:
    """Near-null directions of chi and chi^G removed in the second stage.

    ``chi_kernel`` and ``gamma_kernel`` hold orthonormal columns; the
    complements are the columns of ``chi_range`` and ``gamma_range``.
    """

    chi_kernel: ComplexArray
    gamma_kernel: ComplexArray
    chi_range: ComplexArray
    gamma_range: ComplexArray

    @property
    def trivial(self) -> bool:
        return self.chi_kernel.shape[1] == 0 and self.gamma_kernel.shape[1] == 0


@dataclass(frozen=True, eq=False)
class MarginSolution:
    """Solver output for max t s.t. chi - tI >= 0, chi^G - tI >= 0 and the linear rows.

    Dual values follow the solver's sign conventions; ``z_chi`` and
    ``z_gamma`` belong to the two cone constraints, ``y`` to the equality
    rows and ``z`` to the inequality rows.
    """

    status: SolverStatus
    t: float | None = None
    chi: ComplexArray | None = field(default=None, repr=False)
    z_chi: ComplexArray | None = field(default=None, repr=False)
    z_gamma: ComplexArray | None = field(default=None, repr=False)
    y: FloatArray | None = field(default=None, repr=False)
    z: FloatArray | None = field(default=None, repr=False)
    solve_time: float = 0.0
    message: str = ""


class MarginSolver(Protocol):
    def maximize_margin(self, problem: EVMProblem, face: Face | None = None) -> MarginSolution:
        ...


@dataclass(frozen=True)
class Revalidation:
    equality: float
    inequality: float
    chi_min_eigenvalue: float
    gamma_min_eigenvalue: float
    type_violation: float

    @property
    def ok(self) -> bool:
        return (
            self.equality <= REVALIDATION_TOL
            and self.inequality <= REVALIDATION_TOL
            and self.type_violation <= REVALIDATION_TOL
            and self.chi_min_eigenvalue >= -CONE_TOL
            and self.gamma_min_eigenvalue >= -CONE_TOL
        )


@dataclass(frozen=True, eq=False)
class FeasibilityVerdict:
    verdict: Verdict
    margin: float | None
    status: SolverStatus
    stage: int = 1
    certificate: float | None = None
    revalidation: Revalidation | None = None
    chi: ComplexArray | None = field(default=None, repr=False)
    timings: Mapping[str, float] = field(default_factory=dict)
    diagnostics: str = ""


def _hermitian(m: npt.ArrayLike) -> ComplexArray:
    a = np.asarray(m, dtype=np.complex128)
    return (a + a.conj().T) / 2


def _psd_part(m: npt.ArrayLike) -> ComplexArray:
    w, v = np.linalg.eigh(_hermitian(m))
    return (v * np.clip(w, 0.0, None)) @ v.conj().T


def pair_with_entries(problem: EVMProblem, w: npt.ArrayLike) -> FloatArray:
    """Return <W, Bmat_e> for every unknown e, where chi = sum_e u_e Bmat_e."""
    m = _hermitian(w)
    out = np.zeros(len(problem.entries))
    for e, (r, c) in enumerate(problem.entries):
        if e in problem.eliminated:
            continue
        if r == c:
            out[e] = m[r, r].real
        elif problem.imaginary[e]:
            out[e] = 2 * m[r, c].imag
        else:
            out[e] = 2 * m[r, c].real
    return out


def _rescaled_bound(offset: FloatArray, slope: FloatArray, rhs: float) -> float:
    """Minimum of f(s) = ||offset + s slope||_1 - s rhs over the nominal scales and s > 0.

    f is convex and piecewise linear; its minimum sits at the first kink where
    the slope turns nonnegative, or at the last kink when it never does.
    """
    moving = slope != 0
    kinks = -offset[moving] / slope[moving]
    weights = np.abs(slope[moving])
    ahead = kinks > 0
    order = np.argsort(kinks[ahead])
    k, w = kinks[ahead][order], weights[ahead][order]
    gradient = weights[~ahead].sum() - w.sum() - rhs + 2 * np.cumsum(w)
    candidates = list(DUAL_SCALES)
    if k.size:
        hit = np.flatnonzero(gradient >= 0)
        candidates.append(float(k[hit[0]] if hit.size else k[-1]))
    return min(float(np.abs(offset + s * slope).sum() - s * rhs) for s in candidates)


def certificate_bound(problem: EVMProblem, solution: MarginSolution) -> float | None:
    """Upper bound on the margin of any EVM with entries in [-1, 1], from dual values.

    For PSD Z1, Z2 scaled so that Tr Z1 + Tr Z2 = 1, free y and z >= 0,
    t <= ||g||_1 - y.b - z.d with g = <Z1 + Z2^G, Bmat> + A^T y + C^T z. A
    negative bound rules out every PSD and PPT point, so the state is
    entangled. The bound holds for every rescaling of (y, z) against the
    normalized Z1, Z2, so the best scale is used. Sign conventions of y and z
    are tried both ways.
    """
    if solution.z_chi is None or solution.z_gamma is None:
        return None
    z1 = _psd_part(solution.z_chi)
    z2 = _psd_part(solution.z_gamma)
    scale = float(np.trace(z1).real + np.trace(z2).real)
    if scale <= 0:
        return None
    a, b, c, d = problem.matrices()
    free = np.array([e not in problem.eliminated for e in range(len(problem.entries))], bool)
    base = pair_with_entries(problem, (z1 + transpose_alice(z2, problem.split)) / scale)[free]
    y0 = np.zeros(a.shape[0]) if solution.y is None else np.asarray(solution.y, float) / scale
    z0 = np.zeros(c.shape[0]) if solution.z is None else np.asarray(solution.z, float) / scale
    best: float | None = None
    for sy, sz in product((1.0, -1.0), repeat=2):
        y = sy * y0
        z = np.clip(sz * z0, 0.0, None)
        slope = np.asarray(a.T @ y + c.T @ z, dtype=float)[free]
        bound = _rescaled_bound(base, slope, float(y @ b + z @ d))
        best = bound if best is None else min(best, bound)
    return best


def revalidate(problem: EVMProblem, chi: npt.ArrayLike) -> Revalidation:
    """Check a candidate point with our own arithmetic."""
    m = _hermitian(chi)
    gamma = transpose_alice(m, problem.split)
    eq, ineq = problem.residuals(m)
    return Revalidation(
        equality=eq,
        inequality=ineq,
        chi_min_eigenvalue=float(np.linalg.eigvalsh(m)[0]),
        gamma_min_eigenvalue=float(np.linalg.eigvalsh(_hermitian(gamma))[0]),
        type_violation=problem.type_violation(m),
    )


def _split_spectrum(m: ComplexArray) -> tuple[ComplexArray, ComplexArray]:
    w, v = np.linalg.eigh(_hermitian(m))
    small = w <= NEAR_NULL_EIGENVALUE
    return v[:, small], v[:, ~small]


def near_null_face(problem: EVMProblem, chi: npt.ArrayLike) -> Face:
    """Face spanned by the eigenvectors of chi and chi^G above the near-null threshold."""
    m = _hermitian(chi)
    chi_kernel, chi_range = _split_spectrum(m)
    gamma_kernel, gamma_range = _split_spectrum(transpose_alice(m, problem.split))
    return Face(chi_kernel, gamma_kernel, chi_range, gamma_range)


def polish(chi: npt.ArrayLike, face: Face) -> ComplexArray:
    """Project chi onto the face: W (W^+ chi W) W^+."""
    w = face.chi_range
    m = _hermitian(chi)
    return w @ (w.conj().T @ m @ w) @ w.conj().T


def _timings(*solutions: MarginSolution) -> dict[str, float]:
    return {f"stage{k + 1}": s.solve_time for k, s in enumerate(solutions)}


def verify(problem: EVMProblem, solver: MarginSolver) -> FeasibilityVerdict:
    """Decide whether the compiled constraints admit a PSD and PPT point.

    ENTANGLED needs a negative stage-one margin below -ENTANGLED_MARGIN
    backed by a negative certificate bound. NOT_VERIFIED needs a margin of at
    least FEASIBLE_MARGIN and a re-validated point. Margins in between go
    through face reduction; everything else is INCONCLUSIVE.
    """
    first = solver.maximize_margin(problem)
    if not first.status.usable or first.t is None or first.chi is None:
        return FeasibilityVerdict(
            Verdict.INCONCLUSIVE,
            first.t,
            first.status,
            timings=_timings(first),
            diagnostics=first.message or f"solver status {first.status}",
        )
    if first.t < -ENTANGLED_MARGIN:
        bound = certificate_bound(problem, first)
        if bound is not None and bound < 0:
            return FeasibilityVerdict(
                Verdict.ENTANGLED, first.t, first.status, certificate=bound, timings=_timings(first)
            )
        return FeasibilityVerdict(
            Verdict.INCONCLUSIVE,
            first.t,
            first.status,
            certificate=bound,
            timings=_timings(first),
            diagnostics="negative margin without a valid certificate",
        )
    if first.t >= FEASIBLE_MARGIN:
        check = revalidate(problem, first.chi)
        if check.ok:
            return FeasibilityVerdict(
                Verdict.NOT_VERIFIED,
                first.t,
                first.status,
                revalidation=check,
                chi=_hermitian(first.chi),
                timings=_timings(first),
            )

    face = near_null_face(problem, first.chi)
    if face.trivial:
        return FeasibilityVerdict(
            Verdict.INCONCLUSIVE,
            first.t,
            first.status,
            revalidation=revalidate(problem, first.chi),
            timings=_timings(first),
            diagnostics="boundary margin with no near-null directions",
        )
    second = solver.maximize_margin(problem, face)
    if second.status.usable and second.t is not None and second.chi is not None:
        if second.t >= FEASIBLE_MARGIN:
            polished = polish(second.chi, face)
            check = revalidate(problem, polished)
            if check.ok:
                return FeasibilityVerdict(
                    Verdict.NOT_VERIFIED,
                    second.t,
                    second.status,
                    stage=2,
                    revalidation=check,
                    chi=polished,
                    timings=_timings(first, second),
                )
    return FeasibilityVerdict(
        Verdict.INCONCLUSIVE,
        first.t,
        second.status,
        stage=2,
        timings=_timings(first, second),
        diagnostics=second.message or "face reduction did not produce a certified point",
    )

