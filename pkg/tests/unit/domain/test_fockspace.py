from math import comb

import numpy as np
import pytest

from app.domain.exceptions import FockSpaceError
from app.domain.services.fockspace import (
    compositions,
    enumerate_basis,
    grade_project,
    hadamard_lift,
    identity,
    loss_adjoint,
    pattern_indices,
    spatial_patterns,
)
from app.domain.value_objects import FockOperator, ModeSet


@pytest.mark.parametrize("spatial, cutoff", [(1, 2), (1, 5), (2, 2), (4, 1)])
def test_dimension_matches_binomial(spatial, cutoff):
    """Test the truncated space holds C(cutoff + M, M) states."""
    space = enumerate_basis(ModeSet(spatial), cutoff)

    assert space.dim == comb(cutoff + 2 * spatial, 2 * spatial)


def test_basis_is_graded_then_descending(one_mode_space):
    """Test basis order: by photon number, then descending lexicographic."""
    occupations = [s.occupations for s in one_mode_space.basis]

    assert occupations == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def test_compositions_descending():
    """Test compositions come out in descending lexicographic order."""
    assert list(compositions(2, 2)) == [(2, 0), (1, 1), (0, 2)]


def test_pattern_indices_follow_kronecker_order(two_mode_space):
    """Test states of one spatial pattern are ordered like a Kronecker product."""
    idx = pattern_indices(two_mode_space, (1, 1))

    occupations = [two_mode_space.basis[i].occupations for i in idx]
    assert occupations == [(1, 0, 1, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 1, 0, 1)]


def test_spatial_patterns_of_grade(two_mode_space):
    """Test grade-two patterns of two spatial modes."""
    assert set(spatial_patterns(two_mode_space, 2)) == {(2, 0), (1, 1), (0, 2)}


def test_pattern_indices_reject_wrong_length(two_mode_space):
    """Test a pattern must name every spatial mode."""
    with pytest.raises(FockSpaceError):
        pattern_indices(two_mode_space, (1,))


def test_hadamard_lift_is_involutive(two_mode_space):
    """Test the lifted polarization rotation squares to the identity."""
    u = hadamard_lift(two_mode_space)

    np.testing.assert_allclose(u @ u, np.eye(two_mode_space.dim), atol=1e-12)
    np.testing.assert_allclose(u, u.T, atol=1e-12)


def test_grade_project_keeps_one_block(one_mode_space):
    """Test grade projection zeroes every other photon number."""
    op = identity(one_mode_space)

    projected = grade_project(op, 1)

    assert np.trace(projected.matrix).real == pytest.approx(2.0)
    assert projected.block_diagonal


def test_grade_above_cutoff_rejected(one_mode_space):
    """Test asking for a grade above the cutoff fails."""
    with pytest.raises(FockSpaceError):
        one_mode_space.grade_indices(3)


def test_loss_preserves_identity(two_mode_space):
    """Test pure loss is trace preserving."""
    out = loss_adjoint(identity(two_mode_space), 0.3)

    np.testing.assert_allclose(out.matrix, np.eye(two_mode_space.dim), atol=1e-12)


def test_loss_on_vacuum_projector(one_mode_space):
    """Test <n|L^dagger(|0><0|)|n> = (1 - eta)^n."""
    vac = np.zeros((one_mode_space.dim, one_mode_space.dim))
    vac[0, 0] = 1.0
    op = FockOperator.from_matrix(one_mode_space, vac)

    out = loss_adjoint(op, 0.25)

    two_h = one_mode_space.index_of((2, 0))
    assert out.matrix[two_h, two_h].real == pytest.approx(0.75**2)


def test_loss_rejects_bad_transmittance(one_mode_space):
    """Test transmittance outside [0, 1] is refused."""
    with pytest.raises(FockSpaceError):
        loss_adjoint(identity(one_mode_space), 1.5)


def test_non_hermitian_matrix_rejected(one_mode_space):
    """Test operators must be Hermitian."""
    m = np.zeros((one_mode_space.dim, one_mode_space.dim))
    m[0, 1] = 1.0

    with pytest.raises(FockSpaceError):
        FockOperator.from_matrix(one_mode_space, m)
