import numpy as np
import pytest

from app.domain.exceptions import DetectorModelError, PhotonBoundError
from app.domain.services.photon_bounds import (
    BoundRow,
    PhotonBoundTable,
    bound_table,
    build_witnesses,
    min_witness_over_grade,
    photon_tail_bounds,
    witness_kinds,
    witness_terms,
)
from app.domain.value_objects import (
    DetectorModel,
    Scheme,
    SolverStatus,
    WitnessKind,
)


def _zero_minimizer(block, dims, ppt):
    return 0.0, SolverStatus.OPTIMAL


@pytest.fixture
def perfect_active(active_scheme):
    return DetectorModel.from_array(active_scheme, [[1.0, 1.0]])


@pytest.fixture
def perfect_passive(passive_scheme):
    return DetectorModel.from_array(passive_scheme, [[1.0, 1.0, 1.0, 1.0]])


def test_witness_kinds_per_scheme():
    """Test DC and EE belong to the active scheme, CC to the passive one."""
    assert witness_kinds(Scheme.ACTIVE) == (WitnessKind.DC, WitnessKind.EE)
    assert witness_kinds(Scheme.PASSIVE) == (WitnessKind.CC,)


def test_witness_of_wrong_scheme_rejected():
    """Test a cross-click witness is refused for the active scheme."""
    with pytest.raises(DetectorModelError):
        witness_terms(WitnessKind.CC, Scheme.ACTIVE)


@pytest.mark.parametrize("kind", [WitnessKind.DC, WitnessKind.EE])
def test_low_grades_vanish(kind, perfect_active):
    """Test the vacuum bound is zero and the one-photon DC bound is exact zero."""
    row = min_witness_over_grade(kind, 0, perfect_active)

    assert row.value == 0.0
    assert row.status is SolverStatus.EXACT
    if kind is WitnessKind.DC:
        assert min_witness_over_grade(kind, 1, perfect_active).value == 0.0


def test_two_photons_avoid_double_clicks(perfect_active):
    """Test (|2,0> + |0,2>)/sqrt(2) never double-clicks in either basis."""
    row = min_witness_over_grade(WitnessKind.DC, 2, perfect_active)

    assert row.value == pytest.approx(0.0, abs=1e-12)


def test_three_photons_must_double_click(perfect_active):
    """Test no three-photon state avoids double clicks in both bases."""
    row = min_witness_over_grade(WitnessKind.DC, 3, perfect_active)

    assert row.value > 1e-3
    assert row.status is SolverStatus.EXACT


def test_two_photon_cross_click(perfect_passive):
    """Test two photons split across the arms half of the time."""
    row = min_witness_over_grade(WitnessKind.CC, 2, perfect_passive)

    assert row.value == pytest.approx(0.5)


def test_effective_error_needs_solver(perfect_active):
    """Test EE bounds above one photon cannot be taken without a minimizer."""
    with pytest.raises(PhotonBoundError):
        min_witness_over_grade(WitnessKind.EE, 2, perfect_active)


def test_effective_error_uses_minimizer(perfect_active):
    """Test EE bounds are delegated pattern by pattern."""
    calls = []

    def minimizer(block, dims, ppt):
        calls.append((block.shape, dims, ppt))
        return -0.1, SolverStatus.OPTIMAL

    row = min_witness_over_grade(WitnessKind.EE, 2, perfect_active, minimize=minimizer)

    assert calls == [((6, 6), (2, 3), True)]
    assert row.value == 0.0
    assert row.clamped == pytest.approx(0.1)
    assert row.status is SolverStatus.OPTIMAL


def test_table_lookup_and_plateau(perfect_passive):
    """Test a CC table reports its rows and the plateau grade."""
    table = bound_table(WitnessKind.CC, perfect_passive, 4)

    assert table.max_grade == 4
    assert table.value(1) == 0.0
    assert table.is_monotone()
    with pytest.raises(PhotonBoundError):
        table.row(5)


def test_plateau_detection(perfect_passive):
    """Test the plateau is the first row within the gap of one."""
    rows = (
        BoundRow(0, 0.0, SolverStatus.EXACT),
        BoundRow(1, 0.5, SolverStatus.EXACT),
        BoundRow(2, 0.99999, SolverStatus.EXACT),
    )
    table = PhotonBoundTable(WitnessKind.CC, perfect_passive, rows)

    assert table.plateau_grade() == 2
    assert table.plateau_grade(gap=1e-6) is None


def test_joint_witness_matches_blocks(perfect_active, active_scheme, one_mode_space):
    """Test the full-space DC witness vanishes on its best two-photon state."""
    witnesses = build_witnesses(active_scheme, perfect_active, one_mode_space)
    idx = [one_mode_space.index_of(o) for o in [(2, 0), (1, 1), (0, 2)]]

    block = witnesses[WitnessKind.DC].matrix[np.ix_(idx, idx)]

    assert np.linalg.eigvalsh(block)[0] == pytest.approx(0.0, abs=1e-12)
    assert np.linalg.eigvalsh(block)[-1] == pytest.approx(0.5)


def test_tail_bounds(perfect_active, active_observed):
    """Test tails start above the ideal grade and read the observed witness."""
    tables = {
        WitnessKind.DC: bound_table(WitnessKind.DC, perfect_active, 3),
        WitnessKind.EE: bound_table(
            WitnessKind.EE, perfect_active, 3, minimize=_zero_minimizer
        ),
    }

    tails = photon_tail_bounds(tables, active_observed, max_ideal_grade=2)

    assert [t.kind for t in tails] == [WitnessKind.DC, WitnessKind.EE]
    assert all(t.tail_grade == 3 for t in tails)
    assert tails[0].observed == pytest.approx(active_observed.double_click())
    assert tails[0].tail_min == tables[WitnessKind.DC].value(3)
    assert photon_tail_bounds(tables, active_observed, max_ideal_grade=-1) == ()


def test_tail_bounds_need_tables(active_observed):
    """Test a missing table is reported."""
    with pytest.raises(PhotonBoundError):
        photon_tail_bounds({}, active_observed, max_ideal_grade=1)
