import numpy as np
import pytest

from fracfbmc.config import FracConfig
from fracfbmc.filterbank import design_phydyas


@pytest.fixture(scope="session")
def p256():
    return design_phydyas(256, 4)


@pytest.fixture(scope="session")
def p64():
    return design_phydyas(64, 4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def small_cfg():
    return FracConfig(N=64, N_F=16, L_n=1, M_half=8)
