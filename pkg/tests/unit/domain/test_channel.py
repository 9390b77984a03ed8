import numpy as np
import pytest

from app.domain.exceptions import FockSpaceError, ValueObjectError
from app.domain.services.channel import (
    channel_state,
    resend_density,
    simulate_statistics,
    squash_statistics,
    squashed_problem,
    verify_squashed,
)
from app.domain.services.photon_bounds import alice_projector
from app.domain.services.povm import build_povm
from app.domain.services.verdicts import MarginSolution
from app.domain.value_objects import (
    AliceOutcome,
    ChannelParams,
    ConstraintGroup,
    DetectorModel,
    Outcome,
    Polarization,
    SolverStatus,
    Verdict,
)

from tests.adapters import FakeMarginSolver


def test_two_photon_resend_state():
    """Test the phase-averaged two-photon state."""
    rho = resend_density(2).density

    np.testing.assert_allclose(np.diag(rho), [3 / 8, 1 / 4, 3 / 8])
    assert rho[0, 2] == pytest.approx(1 / 8)
    assert rho[0, 1] == pytest.approx(0.0)


def test_resend_state_is_a_density_matrix():
    """Test larger resend states are normalized and PSD."""
    rho = resend_density(5).density

    assert np.trace(rho) == pytest.approx(1.0)
    assert np.linalg.eigvalsh(rho)[0] > -1e-12
    np.testing.assert_allclose(rho, rho.T)


def test_resend_needs_a_photon():
    """Test an empty resend is refused."""
    with pytest.raises(ValueObjectError):
        resend_density(0)


def test_depolarization_sets_error_rate(active_scheme):
    """Test QBER = omega / 2 with perfect detectors."""
    model = DetectorModel.from_array(active_scheme, [[1.0, 1.0]])

    observed = simulate_statistics(ChannelParams(omega=0.1), model)

    assert observed.error_rate(Polarization.HV) == pytest.approx(0.05)
    assert observed.error_rate(Polarization.DA) == pytest.approx(0.05)
    assert observed.p(AliceOutcome.H, Outcome.H) == pytest.approx(0.5 * 0.95 / 2)


def test_bright_resend_always_double_clicks(active_model):
    """Test the infinite-photon resend fires every detector with eta > 0."""
    observed = simulate_statistics(ChannelParams(omega=0.0, multi_photon=1.0), active_model)

    assert observed.double_click() == pytest.approx(1.0)
    assert observed.p(AliceOutcome.V, Outcome.DA) == pytest.approx(0.25)


def test_bright_resend_cross_clicks(passive_model):
    """Test the infinite-photon resend always hits both passive arms."""
    observed = simulate_statistics(ChannelParams(omega=0.0, multi_photon=1.0), passive_model)

    assert observed.cross_click() == pytest.approx(1.0)


@pytest.mark.parametrize("scheme", ["active", "passive"])
def test_statistics_match_full_state(scheme, channel, one_mode_space, request):
    """Test block-wise statistics agree with traces against the joint state."""
    model = request.getfixturevalue(f"{scheme}_model")
    observed = request.getfixturevalue(f"{scheme}_observed")
    povm = build_povm(model, one_mode_space)
    rho = channel_state(channel, one_mode_space)

    for x in AliceOutcome:
        for y in observed.outcomes:
            element = np.kron(0.5 * alice_projector(x), povm[y].matrix)
            assert np.trace(rho @ element).real == pytest.approx(observed.p(x, y), abs=1e-12)


def test_full_state_needs_finite_resend(one_mode_space):
    """Test the joint state cannot hold the infinite-photon resend."""
    with pytest.raises(FockSpaceError):
        channel_state(ChannelParams(omega=0.0, multi_photon=0.1), one_mode_space)


def test_full_state_needs_room_for_resend(one_mode_space):
    """Test the resend must fit below the cutoff."""
    params = ChannelParams(omega=0.0, multi_photon=0.1, n_resend=3)

    with pytest.raises(FockSpaceError):
        channel_state(params, one_mode_space)


def test_active_squash(active_observed):
    """Test double clicks are split evenly between the single clicks."""
    squashed = squash_statistics(active_observed)

    expected = active_observed.p(AliceOutcome.H, Outcome.V) + 0.5 * active_observed.p(
        AliceOutcome.H, Outcome.HV
    )
    assert squashed.squashed
    assert squashed.p(AliceOutcome.H, Outcome.V) == pytest.approx(expected)
    with pytest.raises(ValueObjectError):
        squash_statistics(squashed)


def test_passive_squash_moves_cross_clicks(passive_observed):
    """Test cross clicks become no-clicks."""
    squashed = squash_statistics(passive_observed)

    x = AliceOutcome.D
    expected = passive_observed.p(x, Outcome.NONE) + passive_observed.p(x, Outcome.CC)
    assert squashed.p(x, Outcome.NONE) == pytest.approx(expected)


@pytest.mark.parametrize("scheme, statements", [("active", 24), ("passive", 20)])
def test_squashed_problem_shape(scheme, statements, request):
    """Test the qutrit problem is real, six-dimensional and fully observed."""
    squashed = squash_statistics(request.getfixturevalue(f"{scheme}_observed"))

    problem = squashed_problem(squashed)

    assert problem.dim == 6
    assert problem.split == (2, 3)
    assert problem.ledger == {ConstraintGroup.OBSERVATION: statements}
    assert not any(problem.imaginary)
    assert not problem.eliminated


def test_squashed_problem_needs_squashed_input(active_observed):
    """Test raw statistics are refused."""
    with pytest.raises(ValueObjectError):
        squashed_problem(active_observed)


def test_qutrit_state_meets_squashed_rows(active_scheme):
    """Test the perfect-detector channel state satisfies its own qutrit rows."""
    model = DetectorModel.from_array(active_scheme, [[1.0, 1.0]])
    params = ChannelParams(omega=0.2, loss=0.3)
    squashed = squash_statistics(simulate_statistics(params, model))
    phi = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)
    signal = 0.8 * np.outer(phi, phi) + 0.2 * np.eye(4) / 4
    rho = np.zeros((6, 6))
    photon = [1, 2, 4, 5]
    rho[np.ix_(photon, photon)] = 0.7 * signal
    rho[0, 0] = rho[3, 3] = 0.15

    equality, _ = squashed_problem(squashed).residuals(rho)

    assert equality < 1e-12


def test_verify_squashed_delegates(active_observed):
    """Test the qutrit problem goes through the shared verifier."""
    solver = FakeMarginSolver([MarginSolution(SolverStatus.INFEASIBLE)])

    verdict = verify_squashed(squash_statistics(active_observed), solver)

    assert verdict.verdict is Verdict.INCONCLUSIVE
    assert verdict.status is SolverStatus.INFEASIBLE
