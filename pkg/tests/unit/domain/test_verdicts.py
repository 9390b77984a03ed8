from dataclasses import replace

import numpy as np
import pytest

from app.domain.services.evm import EVMProblem, LinearConstraint
from app.domain.services.verdicts import (
    MarginSolution,
    certificate_bound,
    near_null_face,
    revalidate,
    verify,
)
from app.domain.value_objects import ConstraintGroup, Relation, SolverStatus, Verdict

from tests.adapters import FakeMarginSolver

ENTRIES = tuple((r, c) for r in range(4) for c in range(r, 4))
_E = {rc: e for e, rc in enumerate(ENTRIES)}
BELL = 0.5 * np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]], dtype=complex)


def _row(terms, rhs):
    return LinearConstraint(terms, Relation.EQ, rhs, ConstraintGroup.OBSERVATION)


def _problem(rows):
    return EVMProblem(
        dictionary=None,
        split=(2, 2),
        entries=ENTRIES,
        imaginary=(False,) * len(ENTRIES),
        eliminated=frozenset(),
        equalities=tuple(rows),
        inequalities=(),
        ledger={ConstraintGroup.OBSERVATION: len(rows)},
    )


@pytest.fixture
def diagonal_rows():
    return [
        _row({_E[(0, 0)]: 1.0}, 0.5),
        _row({_E[(3, 3)]: 1.0}, 0.5),
        _row({_E[(1, 1)]: 1.0}, 0.0),
        _row({_E[(2, 2)]: 1.0}, 0.0),
    ]


@pytest.fixture
def bell_problem(diagonal_rows):
    """Two-qubit problem whose only PSD point is |Phi+><Phi+|."""
    return _problem([*diagonal_rows, _row({_E[(0, 3)]: 1.0}, 0.5)])


def _bell_dual():
    psi = np.array([0.0, 1.0, -1.0, 0.0]) / np.sqrt(2)
    z_gamma = np.outer(psi, psi).astype(complex)
    y = np.array([0.0, 0.0, -0.5, -0.5, 1.0])
    return MarginSolution(
        SolverStatus.OPTIMAL,
        t=-0.5,
        chi=BELL,
        z_chi=np.zeros((4, 4), dtype=complex),
        z_gamma=z_gamma,
        y=y,
    )


def test_bell_certificate_is_negative(bell_problem):
    """Test the singlet witness certifies that |Phi+> is entangled."""
    assert certificate_bound(bell_problem, _bell_dual()) == pytest.approx(-0.5)


@pytest.mark.parametrize("factor", [0.5, 2.0, 1e-3])
def test_certificate_ignores_psd_dual_scale(bell_problem, factor):
    """Test PSD duals reported at another scale than the linear duals still certify."""
    dual = _bell_dual()
    scaled = replace(dual, z_gamma=factor * dual.z_gamma)

    assert certificate_bound(bell_problem, scaled) == pytest.approx(-0.5)


def test_entangled_verdict(bell_problem):
    """Test a negative margin backed by a certificate gives ENTANGLED."""
    solver = FakeMarginSolver([_bell_dual()])

    verdict = verify(bell_problem, solver)

    assert verdict.verdict is Verdict.ENTANGLED
    assert verdict.margin == pytest.approx(-0.5)
    assert verdict.certificate == pytest.approx(-0.5)
    assert verdict.stage == 1


def test_negative_margin_without_duals_is_inconclusive(bell_problem):
    """Test a negative margin alone is never reported as entanglement."""
    solver = FakeMarginSolver([MarginSolution(SolverStatus.OPTIMAL, t=-0.5, chi=BELL)])

    verdict = verify(bell_problem, solver)

    assert verdict.verdict is Verdict.INCONCLUSIVE
    assert verdict.certificate is None


def test_interior_point_not_verified():
    """Test a strictly feasible revalidated point gives NOT_VERIFIED at stage one."""
    trace = _row({_E[(k, k)]: 1.0 for k in range(4)}, 1.0)
    problem = _problem([trace])
    solver = FakeMarginSolver(
        [MarginSolution(SolverStatus.OPTIMAL, t=0.25, chi=np.eye(4, dtype=complex) / 4)]
    )

    verdict = verify(problem, solver)

    assert verdict.verdict is Verdict.NOT_VERIFIED
    assert verdict.stage == 1
    assert verdict.revalidation.ok


def test_boundary_point_goes_through_face_reduction(diagonal_rows):
    """Test a zero margin is resolved on the face of the near-null directions."""
    problem = _problem(diagonal_rows)
    mixed = np.diag([0.5, 0.0, 0.0, 0.5]).astype(complex)
    solver = FakeMarginSolver(
        [
            MarginSolution(SolverStatus.OPTIMAL, t=0.0, chi=mixed),
            MarginSolution(SolverStatus.OPTIMAL, t=0.5, chi=mixed),
        ]
    )

    verdict = verify(problem, solver)

    assert verdict.verdict is Verdict.NOT_VERIFIED
    assert verdict.stage == 2
    assert solver.faces[0] is None
    assert solver.faces[1].chi_kernel.shape == (4, 2)
    np.testing.assert_allclose(verdict.chi, mixed, atol=1e-12)


def test_solver_failure_is_inconclusive(bell_problem):
    """Test solver failures surface as INCONCLUSIVE with the solver status."""
    solver = FakeMarginSolver([MarginSolution(SolverStatus.FAILED, message="diverged")])

    verdict = verify(bell_problem, solver)

    assert verdict.verdict is Verdict.INCONCLUSIVE
    assert verdict.status is SolverStatus.FAILED
    assert verdict.diagnostics == "diverged"


def test_revalidation_catches_npt_points(bell_problem):
    """Test revalidation reports the negative partial-transpose eigenvalue."""
    check = revalidate(bell_problem, BELL)

    assert check.equality < 1e-12
    assert check.gamma_min_eigenvalue == pytest.approx(-0.5)
    assert not check.ok


def test_near_null_face(bell_problem):
    """Test the face keeps the support of chi and drops its kernel."""
    face = near_null_face(bell_problem, BELL)

    assert face.chi_range.shape == (4, 1)
    assert face.gamma_kernel.shape[1] == 1
    assert not face.trivial
