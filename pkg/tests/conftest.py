import numpy as np
import pytest

from vidzero.embedders import HashTextEmbedder


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def embedder():
    return HashTextEmbedder(dim=64)


def random_unit_rows(rng, n, dim):
    rows = rng.standard_normal((n, dim))
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)
