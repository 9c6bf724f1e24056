import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240612)


def random_membership(rng, height, width, c):
    """Valid membership field with rows summing to exactly 1."""
    raw = rng.random((height, width, c)) + 1e-3
    return raw / raw.sum(axis=2, keepdims=True)
