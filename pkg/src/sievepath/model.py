"""Problem data model, block regularizer calculus, objectives and KKT residual.

The problem solved throughout is

    min_X  0.5 * ||X - A||_F^2  +  lam * sum_l w_l ||X_{:i(l)} - X_{:j(l)}||_2

over centroid matrices X with one column per data point. All matrix norms
are Frobenius; residuals of stacked blocks use the Euclidean norm of the
concatenation.
"""

from dataclasses import dataclass, field

import numpy as np

from ._kernels import column_norms, project_columns, prox_columns


class InfeasibleDualError(ValueError):
    """Raised when a dual point violates a block ball constraint."""


@dataclass
class ProblemInstance:
    """Data matrix plus weighted fusion graph.

    A has shape (d, N) with data points as columns. Edges are stored as
    parallel arrays (edge_i, edge_j, weights) in lexicographic order with
    edge_i < edge_j elementwise.
    """

    A: np.ndarray
    edge_i: np.ndarray
    edge_j: np.ndarray
    weights: np.ndarray
    norm_exponent: float = 2.0

    def __post_init__(self):
        self.A = np.ascontiguousarray(self.A, dtype=np.float64)
        if self.A.ndim != 2:
            raise ValueError("A must be a 2-d array (features x points)")
        self.edge_i = np.asarray(self.edge_i, dtype=np.int64)
        self.edge_j = np.asarray(self.edge_j, dtype=np.int64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if not (len(self.edge_i) == len(self.edge_j) == len(self.weights)):
            raise ValueError("edge arrays must have equal length")
        if self.norm_exponent < 1.0:
            raise ValueError("norm_exponent must be >= 1 for convexity")
        if np.any(self.weights <= 0.0):
            raise ValueError("edge weights must be positive")
        if np.any(self.edge_i >= self.edge_j):
            raise ValueError("edges must satisfy i < j")
        n = self.N
        if len(self.edge_i) and (self.edge_i.min() < 0 or self.edge_j.max() >= n):
            raise ValueError("edge endpoints out of range")
        pairs = self.edge_i * n + self.edge_j
        if len(np.unique(pairs)) != len(pairs):
            raise ValueError("duplicate edges")
        order = np.argsort(pairs, kind="stable")
        self.edge_i = self.edge_i[order]
        self.edge_j = self.edge_j[order]
        self.weights = self.weights[order]
        self._incidence = None

    @classmethod
    def from_edges(cls, A, edges, norm_exponent=2.0):
        """Build from an iterable of (i, j, w) triples or (i, j) pairs."""
        edges = list(edges)
        ei = [e[0] for e in edges]
        ej = [e[1] for e in edges]
        w = [e[2] if len(e) > 2 else 1.0 for e in edges]
        return cls(np.asarray(A, dtype=np.float64), ei, ej, w, norm_exponent)

    @property
    def d(self):
        return self.A.shape[0]

    @property
    def N(self):
        return self.A.shape[1]

    @property
    def block_dim(self):
        return self.A.shape[0]

    @property
    def m_blocks(self):
        return len(self.edge_i)

    @property
    def incidence(self):
        """Incidence map realizing B(X) = XJ for this edge set (cached)."""
        if self._incidence is None:
            from .graph import IncidenceMap

            self._incidence = IncidenceMap(self.N, self.edge_i, self.edge_j)
        return self._incidence

    @property
    def regularizer(self):
        return BlockRegularizer(self.weights, self.block_dim, self.norm_exponent)


class BlockRegularizer:
    """Weighted sum of block 2-norms, p(Y) = sum_l w_l ||Y_{:l}||_2.

    The shipped regularizer is the p = 2 block norm; the class is the
    pluggable surface for other exponents.
    """

    def __init__(self, weights, block_dim, norm_exponent=2.0):
        if norm_exponent < 1.0:
            raise ValueError("norm_exponent must be >= 1")
        if norm_exponent != 2.0:
            raise NotImplementedError("only the 2-norm block regularizer ships")
        self.weights = np.asarray(weights, dtype=np.float64)
        self.block_dim = block_dim
        self.norm_exponent = norm_exponent

    @property
    def m_blocks(self):
        return len(self.weights)

    def value(self, Y):
        return float(np.dot(self.weights, column_norms(Y)))

    def prox(self, V, scale):
        """Prox of scale * p at V, blockwise soft-thresholding."""
        return prox_columns(np.ascontiguousarray(V), scale * self.weights)

    def project_dual(self, Z, lam):
        """Project Z blockwise onto the product of balls of radius lam * w_l."""
        return project_columns(np.ascontiguousarray(Z), lam * self.weights)

    def dual_infeasibility(self, Z, lam):
        """Max blockwise excess of ||Z_l|| over lam * w_l (<= 0 when feasible)."""
        if Z.shape[1] == 0:
            return 0.0
        return float(np.max(column_norms(Z) - lam * self.weights))


def prox_block(v, tau):
    """Prox of tau * ||.||_2 at vector v: max(0, 1 - tau/||v||) * v."""
    if tau <= 0.0:
        raise ValueError("tau must be positive")
    v = np.asarray(v, dtype=np.float64)
    nrm = np.linalg.norm(v)
    if nrm <= tau:
        return np.zeros_like(v)
    return (1.0 - tau / nrm) * v


def project_subdiff_block(u, y_block, lam_w):
    """Project u onto the subdifferential of lam_w * ||.||_2 at y_block.

    At y_block = 0 the set is the ball of radius lam_w; otherwise it is the
    singleton lam_w * y / ||y||.
    """
    if lam_w <= 0.0:
        raise ValueError("lam_w must be positive")
    u = np.asarray(u, dtype=np.float64)
    y_block = np.asarray(y_block, dtype=np.float64)
    ny = np.linalg.norm(y_block)
    if ny == 0.0:
        nu = np.linalg.norm(u)
        if nu <= lam_w:
            return u.copy()
        return (lam_w / nu) * u
    return (lam_w / ny) * y_block


def _check_shapes(inst, x, y, z):
    d, N, m = inst.d, inst.N, inst.m_blocks
    if x.shape != (d, N):
        raise ValueError(f"x has shape {x.shape}, expected {(d, N)}")
    if y.shape != (d, m):
        raise ValueError(f"y has shape {y.shape}, expected {(d, m)}")
    if z.shape != (d, m):
        raise ValueError(f"z has shape {z.shape}, expected {(d, m)}")


def kkt_residual(inst, lam, x, y, z):
    """Euclidean norm of the stacked KKT residual at (x, y, z).

    The three parts are gradient stationarity (x - A) + B*(z), the prox
    fixed-point gap y - prox_{lam p}(y + z), and feasibility B(x) - y.
    Zero exactly at (and only at) optimal triples.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    _check_shapes(inst, x, y, z)
    inc = inst.incidence
    reg = inst.regularizer
    grad = (x - inst.A) + inc.adjoint(z)
    prox_gap = y - reg.prox(y + z, lam)
    feas = inc.apply(x) - y
    sq = (
        float(np.sum(grad * grad))
        + float(np.sum(prox_gap * prox_gap))
        + float(np.sum(feas * feas))
    )
    return float(np.sqrt(sq))


def primal_objective(inst, lam, x):
    """F_lam(x) = 0.5||x - A||_F^2 + lam * p(Bx)."""
    x = np.asarray(x, dtype=np.float64)
    diff = x - inst.A
    return 0.5 * float(np.sum(diff * diff)) + lam * inst.regularizer.value(
        inst.incidence.apply(x)
    )


def dual_objective(inst, lam, z):
    """D_lam(z) = -0.5||B*(z)||_F^2 + <B*(z), A> for block-feasible z.

    Raises InfeasibleDualError when some ||z_l|| exceeds lam * w_l; callers
    holding slightly infeasible duals should project first (duality_gap does).
    """
    z = np.asarray(z, dtype=np.float64)
    reg = inst.regularizer
    excess = reg.dual_infeasibility(z, lam)
    if excess > 1e-9 * (1.0 + lam):
        raise InfeasibleDualError(
            f"dual point violates a block ball constraint by {excess:.3e}"
        )
    W = inst.incidence.adjoint(z)
    return -0.5 * float(np.sum(W * W)) + float(np.sum(W * inst.A))


def duality_gap(inst, lam, x, z):
    """Relative duality gap eta = (F - D) / (1 + |F| + |D|).

    z is first projected blockwise onto the feasible balls so that inexact
    duals from inner solvers yield a finite, meaningful gap.
    """
    z = np.asarray(z, dtype=np.float64)
    zf = inst.regularizer.project_dual(z, lam)
    F = primal_objective(inst, lam, x)
    D = dual_objective(inst, lam, zf)
    return (F - D) / (1.0 + abs(F) + abs(D))


@dataclass
class KktTriple:
    """Candidate (x, y, z) with its recomputed KKT residual and gap."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    residual_norm: float
    gap: float

    @classmethod
    def from_point(cls, inst, lam, x, y, z):
        res = kkt_residual(inst, lam, x, y, z)
        gap = duality_gap(inst, lam, x, z)
        return cls(x=x, y=y, z=z, residual_norm=res, gap=gap)


@dataclass
class SolveConfig:
    """Settings for a single-lambda sieve solve."""

    lam: float
    eps: float = 1e-6
    eps_hat: float = 2e-16
    max_sieve_rounds: int | None = None  # None: m_blocks + 1
    admm: object = None  # AdmmConfig, None for defaults
    apg: object = None  # ApgConfig, None for defaults

    def __post_init__(self):
        if self.lam <= 0.0:
            raise ValueError("lam must be positive")
        if self.eps <= 0.0 or self.eps_hat <= 0.0:
            raise ValueError("tolerances must be positive")
