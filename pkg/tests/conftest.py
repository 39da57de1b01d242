import numpy as np
import pytest

from vpsteady import make_uniform_grid


def sinc_density(r):
    """Analytic fixed point for k = -1/2: sin(pi r) / (4 r), pi/4 at r = 0."""
    r = np.asarray(r, dtype=float)
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, np.sin(np.pi * r) / (4 * safe), np.pi / 4)


def sinc_potential(r):
    r = np.asarray(r, dtype=float)
    safe = np.where(r > 0, r, 1.0)
    return np.where(r > 0, -1.0 - np.sin(np.pi * r) / (np.pi * safe), -2.0)


@pytest.fixture(scope="session")
def grid1000():
    return make_uniform_grid(1000)


@pytest.fixture(scope="session")
def grid4000():
    return make_uniform_grid(4000)
