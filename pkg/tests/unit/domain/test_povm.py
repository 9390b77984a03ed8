from itertools import product

import numpy as np
import pytest

from app.domain.exceptions import PovmConstructionError
from app.domain.services.fockspace import enumerate_basis
from app.domain.services.povm import (
    build_active_povm,
    build_povm,
    element_from_blocks,
    outcomes_for_clicks,
    verify_povm_relations,
)
from app.domain.value_objects import DetectorModel, ModeSet, Outcome, Scheme, SchemeConfig


def _diagonal(povm, label, occupations):
    i = povm.space.index_of(occupations)
    return povm[label].matrix[i, i].real


def test_active_groups_resolve_identity(active_model, one_mode_space):
    """Test each active basis resolves the identity."""
    povm = build_povm(active_model, one_mode_space)

    for group in povm.groups():
        total = sum(povm[y].matrix for y in group)
        np.testing.assert_allclose(total, np.eye(one_mode_space.dim), atol=1e-12)


def test_active_single_photon_probabilities(active_model, one_mode_space):
    """Test click probabilities of single H and V photons."""
    povm = build_povm(active_model, one_mode_space)

    assert _diagonal(povm, Outcome.V, (0, 1)) == pytest.approx(0.5)
    assert _diagonal(povm, Outcome.NONE_HV, (0, 1)) == pytest.approx(0.5)
    assert _diagonal(povm, Outcome.D, (1, 0)) == pytest.approx(0.5)
    assert _diagonal(povm, Outcome.A, (1, 0)) == pytest.approx(0.25)
    assert _diagonal(povm, Outcome.HV, (1, 0)) == pytest.approx(0.0)


def test_passive_single_photon_probabilities(passive_model, one_mode_space):
    """Test a single H photon splits 1/2 to H and 1/4 to each of D and A."""
    povm = build_povm(passive_model, one_mode_space)

    assert _diagonal(povm, Outcome.H, (1, 0)) == pytest.approx(0.5)
    assert _diagonal(povm, Outcome.D, (1, 0)) == pytest.approx(0.25)
    assert _diagonal(povm, Outcome.A, (1, 0)) == pytest.approx(0.2)
    assert _diagonal(povm, Outcome.NONE, (1, 0)) == pytest.approx(0.05)
    assert _diagonal(povm, Outcome.V, (1, 0)) == pytest.approx(0.0)
    assert _diagonal(povm, Outcome.CC, (1, 0)) == pytest.approx(0.0)


@pytest.mark.parametrize(
    "scheme, row", [(Scheme.ACTIVE, [1.0, 0.4]), (Scheme.PASSIVE, [1.0, 0.7, 0.9, 0.5])]
)
def test_blockwise_elements_match_builders(scheme, row):
    """Test pattern-by-pattern assembly reproduces the full builders on two spatial modes."""
    config = SchemeConfig(scheme, spatial_mode_count=2)
    model = DetectorModel.from_array(config, [row, row[::-1]])
    space = enumerate_basis(ModeSet(2), 2)
    povm = build_povm(model, space)

    for label in povm.labels:
        np.testing.assert_allclose(
            element_from_blocks(model, space, label).matrix, povm[label].matrix, atol=1e-12
        )


@pytest.mark.parametrize("model_name", ["active_model", "passive_model"])
def test_relation_orderings_hold(model_name, one_mode_space, request):
    """Test the operator orderings used as relation inequalities."""
    model = request.getfixturevalue(model_name)

    report = verify_povm_relations(build_povm(model, one_mode_space))

    assert report.ok, report.violations


def test_scheme_mismatch_rejected(passive_model, one_mode_space):
    """Test the active builder refuses a passive model."""
    with pytest.raises(PovmConstructionError):
        build_active_povm(passive_model, one_mode_space)


def test_cutoff_zero_rejected(active_model):
    """Test a POVM needs at least the one-photon grade."""
    with pytest.raises(PovmConstructionError):
        build_povm(active_model, enumerate_basis(ModeSet(1), 0))


def test_click_patterns_to_outcomes():
    """Test click-set lookup for both schemes."""
    assert outcomes_for_clicks(Scheme.ACTIVE, frozenset({0, 1})) == (Outcome.HV, Outcome.DA)
    assert outcomes_for_clicks(Scheme.PASSIVE, frozenset({0, 2})) == (Outcome.CC,)
    assert outcomes_for_clicks(Scheme.PASSIVE, frozenset()) == (Outcome.NONE,)


def _random_model(rng, scheme: Scheme, spatial_modes: int) -> DetectorModel:
    config = SchemeConfig(scheme, spatial_modes)
    return DetectorModel.from_array(
        config, rng.uniform(size=(spatial_modes, config.detector_count))
    )


def test_random_models_give_valid_povms():
    """Test completeness, positivity, grade structure and orderings on seeded random models."""
    rng = np.random.default_rng(7)
    layouts = list(product(Scheme, (1, 2, 4)))
    spaces = {s: enumerate_basis(ModeSet(s), 3) for s in (1, 2, 4)}

    for k in range(50):
        scheme, spatial_modes = layouts[k % len(layouts)]
        space = spaces[spatial_modes]
        povm = build_povm(_random_model(rng, scheme, spatial_modes), space)

        for group in povm.groups():
            total = sum(povm[y].matrix for y in group)
            np.testing.assert_allclose(total, np.eye(space.dim), atol=1e-10)
        for label in povm.labels:
            assert povm[label].block_diagonal
            assert povm[label].eigenvalues()[0] >= -1e-10
        report = verify_povm_relations(povm)
        assert report.ok, (scheme, spatial_modes, report.violations)


@pytest.mark.parametrize("eta", [1.0, 0.5])
def test_passive_single_h_photon_reaches_h_detector_half_the_time(eta, passive_scheme):
    povm = build_povm(
        DetectorModel.from_array(passive_scheme, [[eta] * 4]), enumerate_basis(ModeSet(1), 3)
    )

    assert _diagonal(povm, Outcome.H, (1, 0)) == pytest.approx(eta / 2)
