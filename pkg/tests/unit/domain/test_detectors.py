import numpy as np
import pytest

from app.domain.exceptions import DetectorModelError, ValueObjectError
from app.domain.services.detectors import renormalize
from app.domain.services.fockspace import enumerate_basis, loss_adjoint
from app.domain.services.povm import build_povm
from app.domain.value_objects import DetectorModel, ModeSet, Scheme, SchemeConfig


def test_renormalize_factors_out_maximum(active_scheme):
    """Test the largest efficiency becomes exactly one."""
    model = DetectorModel.from_array(active_scheme, [[0.8, 0.4]])

    renormalized = renormalize(model)

    assert renormalized.common_transmittance == pytest.approx(0.8)
    assert renormalized.model.efficiencies == ((1.0, 0.5),)
    np.testing.assert_allclose(renormalized.restore(), [[0.8, 0.4]])


def test_renormalize_all_zero_fails(active_scheme):
    """Test a model with nothing to detect cannot be renormalized."""
    model = DetectorModel.from_array(active_scheme, [[0.0, 0.0]])

    with pytest.raises(DetectorModelError):
        renormalize(model)


@pytest.mark.parametrize(
    "scheme, table",
    [(Scheme.ACTIVE, [[0.8, 0.4]]), (Scheme.PASSIVE, [[0.9, 0.45, 0.9, 0.6]])],
)
def test_common_loss_commutes_with_detection(scheme, table, one_mode_space):
    """Test M(eta) equals the loss channel applied to M(eta / eta_0)."""
    model = DetectorModel.from_array(SchemeConfig(scheme), table)
    renormalized = renormalize(model)

    direct = build_povm(model, one_mode_space)
    relative = build_povm(renormalized.model, one_mode_space)

    for label in direct.labels:
        lossy = loss_adjoint(relative[label], renormalized.common_transmittance)
        np.testing.assert_allclose(direct[label].matrix, lossy.matrix, atol=1e-10)


def test_shape_mismatch_rejected(active_scheme):
    """Test the efficiency table must match the detector count."""
    with pytest.raises(DetectorModelError):
        DetectorModel.from_array(active_scheme, [[1.0, 0.5, 1.0]])


def test_efficiency_out_of_range_rejected(active_scheme):
    """Test efficiencies must lie in [0, 1]."""
    with pytest.raises(ValueObjectError):
        DetectorModel.from_array(active_scheme, [[1.2, 0.5]])


def test_symmetric_shortcut_multimode():
    """Test the eta shortcut puts 1 on the diagonal for matching spatial modes."""
    scheme = SchemeConfig(Scheme.ACTIVE, spatial_mode_count=2)

    model = DetectorModel.symmetric(scheme, 0.3)

    assert model.efficiencies == ((1.0, 0.3), (0.3, 1.0))


def test_common_loss_commutes_with_detection_on_random_models():
    """Test M(eta_0 * eta) equals the loss channel applied to M(eta) for seeded draws."""
    rng = np.random.default_rng(11)
    spaces = {s: enumerate_basis(ModeSet(s), 3) for s in (1, 2)}

    for k in range(20):
        scheme = (Scheme.ACTIVE, Scheme.PASSIVE)[k % 2]
        spatial_modes = int(rng.choice([1, 2]))
        config = SchemeConfig(scheme, spatial_modes)
        table = rng.uniform(size=(spatial_modes, config.detector_count))
        eta0 = float(rng.uniform(0.05, 1.0))

        lossy = build_povm(DetectorModel.from_array(config, eta0 * table), spaces[spatial_modes])
        relative = build_povm(DetectorModel.from_array(config, table), spaces[spatial_modes])

        for label in lossy.labels:
            pulled_back = loss_adjoint(relative[label], eta0)
            np.testing.assert_allclose(lossy[label].matrix, pulled_back.matrix, atol=1e-10)
