import numpy as np
import pytest

from chargeq.instances import synthesize_records
from chargeq.reduction import WeightedGraph


@pytest.fixture(scope="session")
def record_pool():
    return synthesize_records(count=2250, seed=1)


def random_complete_graph(n: int, seed: int, lo: float = 0.1, hi: float = 1.0) -> WeightedGraph:
    rng = np.random.default_rng(seed)
    w = np.triu(rng.uniform(lo, hi, size=(n, n)), 1)
    return WeightedGraph(w + w.T)


def random_integer_graph(n: int, seed: int, hi: int = 5) -> WeightedGraph:
    rng = np.random.default_rng(seed)
    w = np.triu(rng.integers(1, hi + 1, size=(n, n)).astype(float), 1)
    return WeightedGraph(w + w.T)
