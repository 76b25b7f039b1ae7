import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260819)


def random_spec(rng, n, coupling_scale=1.0, field_scale=1.0):
    """A random symmetric model with couplings in +/-coupling_scale."""
    import ising_trinity as it

    upper = rng.uniform(-coupling_scale, coupling_scale, (n, n))
    sigma = np.triu(upper, k=1)
    sigma = sigma + sigma.T
    delta = rng.uniform(-field_scale, field_scale, n)
    return it.ModelSpec(delta=delta, sigma=sigma)


def low_rank_spec(rng, n, rank, field_scale=1.0):
    """A model whose canonically shifted couplings have the given rank.

    Rows of a random loading matrix are normalized to unit length, so the
    Gram matrix has a constant unit diagonal; subtracting it leaves symmetric
    couplings whose minimal PSD shift is exactly 1 and whose shifted rank is
    the loading rank.
    """
    import ising_trinity as it

    loadings = rng.normal(size=(n, rank))
    loadings /= np.linalg.norm(loadings, axis=1, keepdims=True)
    sigma = loadings @ loadings.T
    np.fill_diagonal(sigma, 0.0)
    delta = rng.uniform(-field_scale, field_scale, n)
    return it.ModelSpec(delta=delta, sigma=sigma)
