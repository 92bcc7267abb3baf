"""Shared fixtures: canonical parameter sets and a seeded generator."""

import numpy as np
import pytest

from relpack import make_params


@pytest.fixture(scope="session")
def p28():
    """Two factors, radius 0.8, maximal collar."""
    return make_params(2, 0.8)


@pytest.fixture(scope="session")
def p37():
    """Three factors, radius 0.7, maximal collar."""
    return make_params(3, 0.7)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def ball_points(rng, params, count, shave=1e-9):
    """Uniform points strictly inside the ball, as an (count, 2n) array."""
    dim = 2 * params.n
    x = rng.standard_normal((count, dim))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    rad = params.r * (1.0 - shave) * rng.random(count) ** (1.0 / dim)
    return x * rad[:, None]
