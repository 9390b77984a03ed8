import pytest

from app.application.dto import ChannelDTO, ModelDTO, SimulateInputDTO, StatisticsDTO
from app.application.ports import State
from app.application.use_cases import SimulateStatisticsUseCase

from tests.adapters import FakeStatisticsPresenter


@pytest.mark.asyncio
async def test_simulate_active_statistics(active_model_dto, failing_factory):
    """Test noiseless active statistics carry every outcome and no errors."""
    use_case = SimulateStatisticsUseCase(failing_factory)
    presenter = FakeStatisticsPresenter()

    await use_case.execute(SimulateInputDTO(active_model_dto, ChannelDTO(0.0)), presenter)

    assert presenter.state is State.OK
    assert isinstance(presenter.response, StatisticsDTO)
    assert presenter.response.scheme == "active"
    assert {x for x, _, _ in presenter.response.rows} == {"H", "V", "D", "A"}
    assert all(0.0 <= p <= 1.0 for _, _, p in presenter.response.rows)
    assert presenter.response.effective_error == pytest.approx(0.0, abs=1e-12)
    assert presenter.response.cross_click is None
    assert failing_factory.calls == []


@pytest.mark.asyncio
async def test_simulate_passive_reports_cross_clicks(
    passive_model_dto, channel_dto, failing_factory
):
    """Test passive statistics report the cross-click rate only."""
    presenter = FakeStatisticsPresenter()

    await SimulateStatisticsUseCase(failing_factory).execute(
        SimulateInputDTO(passive_model_dto, channel_dto), presenter
    )

    assert presenter.state is State.OK
    assert presenter.response.cross_click is not None
    assert presenter.response.double_click is None


@pytest.mark.asyncio
async def test_simulate_rejects_bad_channel(active_model_dto, failing_factory):
    """Test an out-of-range depolarizing probability is a config error."""
    presenter = FakeStatisticsPresenter()

    await SimulateStatisticsUseCase(failing_factory).execute(
        SimulateInputDTO(active_model_dto, ChannelDTO(omega=1.5)), presenter
    )

    assert presenter.state is State.CONFIG_ERROR
    assert "omega" in presenter.response


@pytest.mark.asyncio
async def test_simulate_rejects_model_of_wrong_width(failing_factory):
    """Test a passive row with two detectors is a config error."""
    presenter = FakeStatisticsPresenter()

    await SimulateStatisticsUseCase(failing_factory).execute(
        SimulateInputDTO(ModelDTO("passive", ((1.0, 0.5),)), ChannelDTO(0.0)), presenter
    )

    assert presenter.state is State.CONFIG_ERROR
