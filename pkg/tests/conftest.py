import numpy as np
import pytest


def random_states(rng, n, dim, phi_scale=1.0):
    """Random admissible conservative states and geopotentials."""
    gamma = 1.4
    rho = 0.2 + rng.random(n)
    u = rng.standard_normal((n, dim))
    p = 0.2 + rng.random(n)
    phi = phi_scale * rng.random(n)
    rhoe = p / (gamma - 1.0) + rho * phi + 0.5 * rho * np.sum(u * u, axis=-1)
    q = np.concatenate([rho[:, None], rho[:, None] * u, rhoe[:, None]], axis=1)
    return q, phi


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
