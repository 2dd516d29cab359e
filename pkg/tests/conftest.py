import numpy as np
import pytest

from oceanray.profiles import (
    Profiles,
    make_betaplane,
    make_bump,
    make_signed_zonal,
    make_zero_zonal,
)


@pytest.fixture(scope="session")
def flat_plane():
    """Linear rotation, no convection: every closed form is available."""
    return Profiles(make_zero_zonal(), make_betaplane(1.0))


@pytest.fixture(scope="session")
def signed_plane():
    """Linear rotation with the signed current: zero-energy seeds exist."""
    return Profiles(make_signed_zonal(0.3, 2.0), make_betaplane(1.0))


@pytest.fixture(scope="session")
def convective_plane():
    """Linear rotation plus a gentle bump current: generic mixed taxonomy."""
    return Profiles(make_bump(0.0, 1.0, 0.3), make_betaplane(1.0))


@pytest.fixture(scope="session")
def steep_bump_plane():
    """The periodic trapped-seed construction profile: u1(0)=0.5, u1''(0)=-6.25."""
    return Profiles(make_bump(0.0, 0.4, 0.5), make_betaplane(1.0))


@pytest.fixture()
def rng():
    return np.random.RandomState(20240817)
