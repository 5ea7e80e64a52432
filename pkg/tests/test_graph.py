import numpy as np
import pytest
import scipy.sparse as sp

from sievepath import (
    GraphError,
    IncidenceMap,
    build_knn_graph,
    build_partition,
    recover_primal,
    reduce_problem,
)
from sievepath.model import primal_objective

from conftest import random_instance


def partition_invariants(inst, part):
    """B_{I beta} = 0 and B_{I alpha} + B_{I gamma} M^T = 0, exactly."""
    B = inst.incidence.J.T.tocsr()
    BI = B[part.I]
    assert BI[:, part.beta].nnz == 0
    resid = BI[:, part.alpha] + BI[:, part.gamma] @ part.M.T
    assert np.abs(resid.toarray()).max() == 0.0 if resid.nnz else True
    # every column of M carries exactly one 1
    if part.M.shape[1]:
        assert np.all(np.asarray(part.M.sum(axis=0)).ravel() == 1.0)
    # alpha nodes are their component's minimum
    for a, comp in zip(part.alpha, part.components):
        assert a == comp.min()


def test_incidence_apply_adjoint():
    rng = np.random.default_rng(0)
    inc = IncidenceMap(5, [0, 0, 2], [1, 3, 4])
    X = rng.standard_normal((3, 5))
    Z = rng.standard_normal((3, 3))
    BX = inc.apply(X)
    assert np.allclose(BX[:, 0], X[:, 0] - X[:, 1])
    assert abs(np.sum(BX * Z) - np.sum(X * inc.adjoint(Z))) <= 1e-12
    # each column of J sums to zero with exactly one +1 and one -1
    J = inc.J.toarray()
    assert np.all(J.sum(axis=0) == 0)
    assert np.all(np.abs(J).sum(axis=0) == 2)


def test_knn_identical_points():
    A = np.zeros((2, 2))
    inst = build_knn_graph(A, k=1)
    assert inst.m_blocks == 1
    assert inst.weights[0] == 1.0


def test_knn_line_example():
    A = np.array([[0.0, 1.0, 5.0]])
    inst = build_knn_graph(A, k=1)
    pairs = set(zip(inst.edge_i, inst.edge_j))
    assert pairs == {(0, 1), (1, 2)}
    w = dict(zip(zip(inst.edge_i, inst.edge_j), inst.weights))
    assert w[(0, 1)] == pytest.approx(np.exp(-0.5))
    assert w[(1, 2)] == pytest.approx(np.exp(-8.0))


def test_knn_complete_graph():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 7))
    inst = build_knn_graph(A, k=6)
    assert inst.m_blocks == 7 * 6 // 2


def test_knn_tie_break_smaller_index():
    # points 1 and 2 are equidistant from 0; k=1 must pick index 1
    A = np.array([[0.0, 1.0, -1.0]])
    inst = build_knn_graph(A, k=1)
    pairs = set(zip(inst.edge_i, inst.edge_j))
    assert (0, 1) in pairs


def test_knn_rejects_bad_input():
    with pytest.raises(GraphError):
        build_knn_graph(np.zeros((2, 1)), k=1)
    with pytest.raises(GraphError):
        build_knn_graph(np.zeros((2, 5)), k=5)
    with pytest.raises(GraphError):
        build_knn_graph(np.zeros((2, 5)), k=0)


def test_build_partition_hand_example():
    # nodes 0,1,2 with edges e0=(0,1), e1=(0,2), e2=(1,2); I={e0}
    inc = IncidenceMap(3, [0, 0, 1], [1, 2, 2])
    part = build_partition(inc, [0])
    assert list(part.alpha) == [0]
    assert list(part.beta) == [2]
    assert list(part.gamma) == [1]
    assert part.M.toarray().tolist() == [[1.0]]


def test_build_partition_empty_and_full():
    inc = IncidenceMap(3, [0, 0, 1], [1, 2, 2])
    empty = build_partition(inc, [])
    assert len(empty.alpha) == 0 and len(empty.gamma) == 0
    assert list(empty.beta) == [0, 1, 2]

    full = build_partition(inc, [0, 1, 2])
    assert list(full.alpha) == [0]
    assert len(full.beta) == 0
    assert list(full.gamma) == [1, 2]
    assert full.M.toarray().tolist() == [[1.0, 1.0]]


def test_partition_invariants_random():
    rng = np.random.default_rng(2)
    for _ in range(30):
        inst = random_instance(rng)
        m = inst.m_blocks
        size = int(rng.integers(0, m + 1))
        I = rng.choice(m, size=size, replace=False)
        part = build_partition(inst.incidence, I)
        partition_invariants(inst, part)
        # gamma block of B has full column rank
        if len(part.gamma):
            Bg = inst.incidence.J.T.tocsr()[part.I][:, part.gamma].toarray()
            assert np.linalg.matrix_rank(Bg) == len(part.gamma)


def test_reduce_problem_t1_hessian(t1_inst):
    part = build_partition(t1_inst.incidence, [0])  # fuse edge (0,1)
    red = reduce_problem(t1_inst, part, 1.0)
    assert list(red.h) == [2.0, 1.0]
    assert np.allclose(red.C, [[1.0, 5.0]])  # A0+A1 folded onto alpha, beta=A2


def test_reduce_problem_full_fusion(t1_inst):
    part = build_partition(t1_inst.incidence, [0, 1, 2])
    red = reduce_problem(t1_inst, part, 1.0)
    assert red.m_red == 0
    assert list(red.h) == [3.0]
    # phi minimized at the centroid 2 with optimal value phi = 1.5*(x-2)^2 + c
    x_opt = red.C / red.h
    assert x_opt[0, 0] == pytest.approx(2.0)
    assert red.phi(x_opt + 1.0) - red.phi(x_opt) == pytest.approx(1.5)


def test_reduced_objective_matches_full(t1_inst):
    """phi on the reduced variables equals f on the embedded full point."""
    rng = np.random.default_rng(3)
    for I in ([0], [1], [0, 1, 2], []):
        part = build_partition(t1_inst.incidence, I)
        red = reduce_problem(t1_inst, part, 0.7)
        Xr = rng.standard_normal((1, part.n_reduced))
        x, y = recover_primal(part, Xr, red.apply(Xr))
        full = primal_objective(t1_inst, 0.7, x)
        assert red.primal_objective(Xr) == pytest.approx(full, abs=1e-10)


def test_recover_primal_exactness(t1_inst):
    part = build_partition(t1_inst.incidence, [0])
    x, y = recover_primal(part, np.array([[0.5, 5.0]]), np.zeros((1, 2)))
    assert np.allclose(x, [[0.5, 0.5, 5.0]])
    BX = t1_inst.incidence.apply(x)
    assert np.all(BX[:, part.I] == 0.0)
    with pytest.raises(ValueError):
        recover_primal(part, np.zeros((1, 3)), np.zeros((1, 2)))


def test_recover_primal_identity_embedding(t1_inst):
    part = build_partition(t1_inst.incidence, [])
    Xr = np.array([[1.0, 2.0, 3.0]])
    Yr = np.array([[0.1, 0.2, 0.3]])
    x, y = recover_primal(part, Xr, Yr)
    assert np.array_equal(x, Xr)
    assert np.array_equal(y, Yr)