import pytest

from balldiff import GaussianState, make_physical_params


@pytest.fixture
def params():
    """Natural units: hbar = 1, mass = 1, so diffusivity = 0.5."""
    return make_physical_params(1.0, 1.0)


@pytest.fixture
def unit_state():
    return GaussianState(sigma0=1.0, center=0.0)
