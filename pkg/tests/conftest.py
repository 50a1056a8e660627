import numpy as np
import pytest

from semidirect.group import Matrix2


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_matrix2(rng, scale: float = 1.0) -> Matrix2:
    """Random matrix with entries in [-scale, scale] (trace normalized)."""
    e = rng.uniform(-scale, scale, size=4)
    return Matrix2(*e)


def random_point(rng, scale: float = 1.5) -> np.ndarray:
    return rng.uniform(-scale, scale, size=3)
