import numpy as np
import pytest

from app.application.dto import ModelDTO, PovmDumpDTO, PovmDumpInputDTO
from app.application.ports import State
from app.application.use_cases import DumpPovmUseCase

from tests.adapters import FakePovmPresenter


@pytest.mark.asyncio
async def test_active_povm_dump(active_model_dto, failing_factory):
    """Test the dump lists every element and the relation checks hold."""
    presenter = FakePovmPresenter()

    await DumpPovmUseCase(failing_factory).execute(PovmDumpInputDTO(active_model_dto), presenter)

    assert presenter.state is State.OK
    dump = presenter.response
    assert isinstance(dump, PovmDumpDTO)
    assert dump.scheme == "active"
    assert set(dump.elements) == {"none+", "nonex", "H", "V", "HV", "D", "A", "DA"}
    size = len(dump.basis)
    assert all(m.shape == (size, size) for m in dump.elements.values())
    assert dump.relations_ok
    assert failing_factory.calls == []


@pytest.mark.asyncio
async def test_passive_elements_sum_to_identity(passive_model_dto, failing_factory):
    presenter = FakePovmPresenter()

    await DumpPovmUseCase(failing_factory).execute(
        PovmDumpInputDTO(passive_model_dto, cutoff=3), presenter
    )

    dump = presenter.response
    total = sum(dump.elements.values())
    np.testing.assert_allclose(total, np.eye(len(dump.basis)), atol=1e-10)
    assert dump.relations_ok
    assert all(name.endswith("^2") for name in dump.relations)


@pytest.mark.asyncio
async def test_negative_cutoff_is_config_error(failing_factory):
    presenter = FakePovmPresenter()

    await DumpPovmUseCase(failing_factory).execute(
        PovmDumpInputDTO(ModelDTO("active", ((1.0, 1.0),)), cutoff=-1), presenter
    )

    assert presenter.state is State.CONFIG_ERROR
