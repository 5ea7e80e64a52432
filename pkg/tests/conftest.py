import numpy as np
import pytest

from sievepath import ProblemInstance, build_knn_graph


def _t1():
    A = np.array([[0.0, 1.0, 5.0]])
    return ProblemInstance.from_edges(A, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def t1_inst():
    """1-d three-point line (0, 1, 5) with a complete unit-weight graph."""
    return _t1()


@pytest.fixture(scope="module")
def t1_module_inst():
    """Module-scoped copy of t1_inst for fixtures that cache solves."""
    return _t1()


def random_instance(rng, N=None, d=None, k=None):
    """Small random k-NN instance for oracle comparisons."""
    N = N or int(rng.integers(4, 13))
    d = d or int(rng.integers(1, 4))
    k = k or int(rng.integers(1, min(N - 1, 5) + 1))
    A = rng.standard_normal((d, N)) * rng.uniform(0.5, 2.0)
    return build_knn_graph(A, k=k)
