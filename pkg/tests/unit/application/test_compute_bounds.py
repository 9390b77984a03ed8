import math

import pytest

from app.application.dto import BoundsInputDTO, BoundsTableDTO, ModelDTO
from app.application.ports import State
from app.application.use_cases import ComputeBoundsUseCase

from tests.adapters import FakeBoundsPresenter


@pytest.mark.asyncio
async def test_active_bounds_cover_both_witnesses(active_model_dto, failing_factory):
    """Test an active model yields dc and ee rows for every grade."""
    presenter = FakeBoundsPresenter()

    await ComputeBoundsUseCase(failing_factory).execute(
        BoundsInputDTO((active_model_dto,), max_grade=3), presenter
    )

    assert presenter.state is State.OK
    assert isinstance(presenter.response, BoundsTableDTO)
    assert len(presenter.response.rows) == 8
    assert {r.kind for r in presenter.response.rows} == {"DC", "EE"}
    assert {r.model for r in presenter.response.rows} == {"active-test"}
    assert all(0.0 <= r.value <= 1.0 for r in presenter.response.rows)
    assert failing_factory.backend.minimized


@pytest.mark.asyncio
async def test_zero_and_one_photon_rows_are_exact(active_model_dto, failing_factory):
    presenter = FakeBoundsPresenter()

    await ComputeBoundsUseCase(failing_factory).execute(
        BoundsInputDTO((active_model_dto,), max_grade=2), presenter
    )

    dc = {r.n: r for r in presenter.response.rows if r.kind == "DC"}
    assert dc[0].value == 0.0 and dc[0].status == "exact"
    assert dc[1].value == 0.0 and dc[1].status == "exact"


@pytest.mark.asyncio
async def test_passive_bounds_need_no_solver(passive_model_dto, failing_factory):
    """Test cross-click bounds come from eigenvalues alone."""
    presenter = FakeBoundsPresenter()

    await ComputeBoundsUseCase(failing_factory).execute(
        BoundsInputDTO((passive_model_dto,), max_grade=4), presenter
    )

    assert presenter.state is State.OK
    assert {r.kind for r in presenter.response.rows} == {"CC"}
    assert all(r.status == "exact" for r in presenter.response.rows)
    assert presenter.response.monotone == {"CC:passive-test": True}
    assert failing_factory.backend.minimized == []


@pytest.mark.asyncio
async def test_failed_minimization_is_inconclusive(active_model_dto, broken_bounds_factory):
    presenter = FakeBoundsPresenter()

    await ComputeBoundsUseCase(broken_bounds_factory).execute(
        BoundsInputDTO((active_model_dto,), max_grade=2), presenter
    )

    assert presenter.state is State.INCONCLUSIVE
    ee = [r for r in presenter.response.rows if r.kind == "EE" and r.n > 0]
    assert ee and all(r.status == "failed" and math.isnan(r.value) for r in ee)


@pytest.mark.asyncio
async def test_unknown_scheme_is_config_error(failing_factory):
    presenter = FakeBoundsPresenter()

    await ComputeBoundsUseCase(failing_factory).execute(
        BoundsInputDTO((ModelDTO("hybrid", ((1.0, 1.0),)),), max_grade=2), presenter
    )

    assert presenter.state is State.CONFIG_ERROR
