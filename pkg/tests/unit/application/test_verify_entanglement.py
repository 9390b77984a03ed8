import pytest

from app.application.dto import PipelineDTO, StatisticsDTO, VerdictDTO, VerifyInputDTO
from app.application.ports import State
from app.application.use_cases import VerifyEntanglementUseCase
from app.application.use_cases.pipeline import LEDGER_CONTRACT
from app.domain.value_objects import ConstraintGroup, Scheme

from tests.adapters import FakeVerdictPresenter


@pytest.mark.asyncio
async def test_solver_failure_is_inconclusive(active_model_dto, active_statistics, failing_factory):
    """Test a failing backend yields an INCONCLUSIVE verdict with diagnostics."""
    use_case = VerifyEntanglementUseCase(failing_factory)
    presenter = FakeVerdictPresenter()

    await use_case.execute(VerifyInputDTO(active_model_dto, active_statistics), presenter)

    assert presenter.state is State.INCONCLUSIVE
    assert isinstance(presenter.response, VerdictDTO)
    assert presenter.response.verdict == "INCONCLUSIVE"
    assert presenter.response.diagnostics == "scripted failure"
    assert presenter.response.witness is None
    assert failing_factory.backend.problems[0].dim == 36


@pytest.mark.asyncio
async def test_ledger_reported(active_model_dto, active_statistics, failing_factory):
    """Test the one-mode active ledger is reported with the verdict."""
    presenter = FakeVerdictPresenter()

    await VerifyEntanglementUseCase(failing_factory).execute(
        VerifyInputDTO(active_model_dto, active_statistics), presenter
    )

    assert presenter.state is State.INCONCLUSIVE
    assert presenter.response.ledger == {
        "observation": 16,
        "alice-cross": 12,
        "operator-relation": 188,
        "commutation": 72,
        "realness": 34,
        "projection-decomposition": 320,
        "relation-inequality": 108,
        "photon-tail": 16,
    }
    assert presenter.response.common_transmittance == pytest.approx(1.0)


@pytest.mark.asyncio
async def test_ledger_drift_is_an_error_by_default(
    active_model_dto, active_statistics, failing_factory, monkeypatch
):
    """Test a statement count off the contract stops verification unless lenient."""
    monkeypatch.setitem(LEDGER_CONTRACT[Scheme.ACTIVE], ConstraintGroup.COMMUTING, 187)
    strict, lenient = FakeVerdictPresenter(), FakeVerdictPresenter()
    use_case = VerifyEntanglementUseCase(failing_factory)

    await use_case.execute(VerifyInputDTO(active_model_dto, active_statistics), strict)
    await use_case.execute(
        VerifyInputDTO(active_model_dto, active_statistics, strict_ledger=False), lenient
    )

    assert strict.state is State.ERROR
    assert "operator-relation" in strict.response
    assert lenient.state is State.INCONCLUSIVE


@pytest.mark.asyncio
async def test_dump_problem_lists_constraints(active_model_dto, active_statistics, failing_factory):
    """Test problem dumps carry one row per compiled statement."""
    presenter = FakeVerdictPresenter()

    await VerifyEntanglementUseCase(failing_factory).execute(
        VerifyInputDTO(active_model_dto, active_statistics, dump_problem=True), presenter
    )

    response = presenter.response
    problem = failing_factory.backend.problems[0]
    assert len(response.constraints) == len(problem.equalities) + len(problem.inequalities)
    assert len(response.operators) == 18
    assert {row.relation for row in response.constraints} <= {"=", ">="}


@pytest.mark.asyncio
async def test_measurement_only_dictionary_has_no_tails(
    active_model_dto, active_statistics, failing_factory
):
    """Test measurement-only verification compiles without photon tails."""
    presenter = FakeVerdictPresenter()

    await VerifyEntanglementUseCase(failing_factory).execute(
        VerifyInputDTO(active_model_dto, active_statistics, PipelineDTO(max_ideal_grade=-1)),
        presenter,
    )

    assert presenter.state is State.INCONCLUSIVE
    assert "photon-tail" not in presenter.response.ledger
    assert failing_factory.backend.minimized == []


@pytest.mark.asyncio
async def test_unknown_outcome_is_an_error(active_model_dto, active_statistics, failing_factory):
    """Test statistics with an unknown outcome label are rejected."""
    rows = (*active_statistics.rows, ("H", "Q", 0.0))
    presenter = FakeVerdictPresenter()

    await VerifyEntanglementUseCase(failing_factory).execute(
        VerifyInputDTO(active_model_dto, StatisticsDTO("active", rows)), presenter
    )

    assert presenter.state is State.ERROR
    assert failing_factory.backend.problems == []


@pytest.mark.asyncio
async def test_missing_tail_bound_is_an_error(
    active_model_dto, active_statistics, broken_bounds_factory
):
    """Test failed photon-bound solves surface as an error, not a verdict."""
    presenter = FakeVerdictPresenter()

    await VerifyEntanglementUseCase(broken_bounds_factory).execute(
        VerifyInputDTO(active_model_dto, active_statistics), presenter
    )

    assert presenter.state is State.ERROR
    assert broken_bounds_factory.backend.problems == []
