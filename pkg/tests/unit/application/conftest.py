import pytest

from app.application.dto import ChannelDTO, ModelDTO
from app.application.use_cases.pipeline import statistics_dto, to_model, to_params
from app.domain.services.channel import simulate_statistics
from app.domain.value_objects import SolverStatus

from tests.adapters import FakeBackendFactory, FakeSolverBackend


@pytest.fixture
def active_model_dto():
    """Active single-spatial-mode model with a 50% V/A detector."""
    return ModelDTO("active", ((1.0, 0.5),), "active-test")


@pytest.fixture
def passive_model_dto():
    return ModelDTO("passive", ((1.0, 0.6, 1.0, 0.8),), "passive-test")


@pytest.fixture
def channel_dto():
    return ChannelDTO(omega=0.05, loss=0.5, multi_photon=0.01, n_resend=2)


@pytest.fixture
def active_statistics(active_model_dto, channel_dto):
    observed = simulate_statistics(to_params(channel_dto), to_model(active_model_dto))
    return statistics_dto(observed)


@pytest.fixture
def failing_factory():
    """Margin programs fail; witness minimizations succeed with value 0."""
    return FakeBackendFactory(FakeSolverBackend(margin_status=SolverStatus.FAILED))


@pytest.fixture
def broken_bounds_factory():
    """Witness minimizations fail, so no tail bound is available."""
    return FakeBackendFactory(
        FakeSolverBackend(
            expectation=float("nan"), expectation_status=SolverStatus.FAILED
        )
    )
