import pytest

from app.domain.services.channel import simulate_statistics
from app.domain.services.fockspace import enumerate_basis
from app.domain.value_objects import ChannelParams, DetectorModel, ModeSet, Scheme, SchemeConfig


@pytest.fixture
def active_scheme():
    return SchemeConfig(Scheme.ACTIVE)


@pytest.fixture
def passive_scheme():
    return SchemeConfig(Scheme.PASSIVE)


@pytest.fixture
def active_model(active_scheme):
    """Active single-spatial-mode model with a 50% V/A detector."""
    return DetectorModel.from_array(active_scheme, [[1.0, 0.5]])


@pytest.fixture
def passive_model(passive_scheme):
    """Passive single-spatial-mode model with weak V and A detectors."""
    return DetectorModel.from_array(passive_scheme, [[1.0, 0.6, 1.0, 0.8]])


@pytest.fixture
def one_mode_space():
    """One spatial mode up to two photons."""
    return enumerate_basis(ModeSet(1), 2)


@pytest.fixture
def two_mode_space():
    """Two spatial modes up to two photons."""
    return enumerate_basis(ModeSet(2), 2)


@pytest.fixture
def channel():
    """Lossy, slightly depolarized channel with a rare two-photon resend."""
    return ChannelParams(omega=0.05, loss=0.5, multi_photon=0.01, n_resend=2)


@pytest.fixture
def active_observed(channel, active_model):
    return simulate_statistics(channel, active_model)


@pytest.fixture
def passive_observed(channel, passive_model):
    return simulate_statistics(channel, passive_model)
