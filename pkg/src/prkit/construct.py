"""Turn graphs into the sub-stochastic and stochastic walk operators.

Covers the standard random walk, the three dangling-node corrections
(teleportation-reinforcing, independent, and self-loop), the reverse and
weighted walks, Dirichlet reduction to a pseudo problem, and the closed-form
stationary vector of an undirected walk.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .core import (
    ConvergenceError,
    DegreeInfo,
    Graph,
    SparseMatrix,
    ValidationError,
    connected_components,
    degrees,
    is_symmetric,
)
from .solver import PseudoProblem

COLSUM_TOL = 1e-12

MODES = ("strong", "weak", "sink", "none")


def _check_probability(v, n, what="teleportation vector") -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (n,):
        raise ValidationError(f"{what} must have length {n}")
    if not np.all(np.isfinite(v)) or np.any(v < 0):
        raise ValidationError(f"{what} must be nonnegative and finite")
    if abs(v.sum() - 1.0) > COLSUM_TOL:
        raise ValidationError(f"{what} must sum to 1 (got {v.sum():.17g})")
    return v


def _col_divide(csc: sp.csc_matrix, denom: np.ndarray) -> sp.csc_matrix:
    """Divide each column j by denom[j]; columns with denom 0 become zero.

    One true division per entry, so simple rationals round the same way as
    their literal counterparts."""
    csc = csc.copy()
    cols = np.repeat(np.arange(csc.shape[1]), np.diff(csc.indptr))
    d = denom[cols]
    out = np.zeros_like(csc.data)
    np.divide(csc.data, d, out=out, where=(d != 0))
    csc.data = out
    csc.eliminate_zeros()
    return csc


@dataclass(frozen=True, eq=False)
class SubStochastic:
    """Column sub-stochastic matrix plus its correction vector
    c^T = e^T - e^T pbar (the per-column probability deficit)."""

    pbar: SparseMatrix
    correction: np.ndarray

    def __post_init__(self):
        if self.pbar.n_rows != self.pbar.n_cols:
            raise ValidationError("sub-stochastic matrix must be square")
        c = np.asarray(self.correction, dtype=np.float64)
        object.__setattr__(self, "correction", c)
        if c.shape != (self.n,):
            raise ValidationError("correction vector length mismatch")
        sums = self.pbar.col_sums()
        if sums.size and sums.max() > 1.0 + COLSUM_TOL:
            raise ValidationError(f"column sums exceed 1 (max {sums.max():.17g})")
        if np.any(c < -COLSUM_TOL) or np.any(np.abs(c - (1.0 - sums)) > COLSUM_TOL):
            raise ValidationError("correction must equal e^T - e^T pbar")

    @property
    def n(self) -> int:
        return self.pbar.n_cols

    def apply(self, x):
        """pbar @ x for a vector or a stack of column vectors."""
        return self.pbar.csc @ x

    def to_dense(self) -> np.ndarray:
        return self.pbar.toarray()


@dataclass(frozen=True, eq=False)
class StochasticOperator:
    """Implicit column-stochastic matrix pbar + rank-1 or diagonal correction.

    mode 'strong' adds dist * c^T, 'weak' adds an independent dist * c^T,
    'sink' adds diag(c), and 'none' leaves pbar untouched. The correction is
    applied on the fly; the dense update is never materialized.
    """

    base: SubStochastic
    mode: str
    dist: np.ndarray | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"unknown correction mode {self.mode!r}")
        if self.mode in ("strong", "weak"):
            d = _check_probability(self.dist, self.base.n, "correction distribution")
            object.__setattr__(self, "dist", d)
        elif self.dist is not None:
            raise ValidationError(f"mode {self.mode!r} takes no distribution")

    @property
    def n(self) -> int:
        return self.base.n

    def apply(self, x):
        """Apply the implicit stochastic matrix to a vector or to each column
        of a matrix."""
        y = self.base.pbar.csc @ x
        c = self.base.correction
        if self.mode in ("strong", "weak"):
            ctx = c @ x
            if np.ndim(x) == 1:
                y += self.dist * ctx
            else:
                y += np.outer(self.dist, ctx)
        elif self.mode == "sink":
            y += c[:, None] * x if np.ndim(x) == 2 else c * x
        return y

    def to_sparse(self) -> SparseMatrix:
        """Materialize the corrected matrix sparsely (small-graph helper for
        oracles and reductions; the correction fills one column per nonzero
        of c)."""
        p = self.base.pbar.csc
        c = self.base.correction
        if self.mode in ("strong", "weak"):
            idx = np.flatnonzero(c)
            if idx.size:
                n = self.n
                rows = np.tile(np.arange(n), idx.size)
                cols = np.repeat(idx, n)
                vals = np.outer(c[idx], self.dist).ravel()
                p = p + sp.coo_matrix((vals, (rows, cols)), shape=p.shape).tocsc()
        elif self.mode == "sink":
            p = p + sp.diags(c).tocsc()
        return SparseMatrix._wrap(p)

    def to_dense(self) -> np.ndarray:
        return self.to_sparse().toarray()


def random_walk(g: Graph) -> SubStochastic:
    """Standard (possibly weighted) random-walk matrix pbar = A^T D^+.

    Column i holds the transition probabilities out of node i,
    pbar[j, i] = A[i, j] / d[i]; dangling columns stay zero and are recorded
    in the correction vector as an exact 0/1 indicator.
    """
    deg = degrees(g)
    at = g.adjacency.transpose().csc
    pbar = _col_divide(at, deg.out_degrees)
    c = deg.dangling_mask.astype(np.float64)
    return SubStochastic(SparseMatrix._wrap(pbar), c)


def reverse_walk(g: Graph) -> SubStochastic:
    """Random walk on the edge-reversed graph, pbar = A diag(A^T e)^+."""
    return random_walk(Graph(g.adjacency.transpose(), directed=True))


def weighted_walk(g: Graph, dw) -> SubStochastic:
    """Walk that leaves node i for node j with probability proportional to
    A[i, j] * dw[j], i.e. pbar = D_W A^T diag(A D_W e)^+.

    ``dw`` is any nonnegative per-node weight vector (helpers below build the
    in-/out-/total-degree choices). A column whose targets carry zero total
    weight becomes dangling.
    """
    dw = np.asarray(dw, dtype=np.float64)
    if dw.shape != (g.n,):
        raise ValidationError(f"weight vector must have length {g.n}")
    if not np.all(np.isfinite(dw)) or np.any(dw < 0):
        raise ValidationError("weight vector must be nonnegative and finite")
    denom = g.adjacency.matvec(dw)  # A D_W e
    numer = sp.diags(dw) @ g.adjacency.transpose().csc  # D_W A^T
    pbar = _col_divide(numer.tocsc(), denom)
    c = (denom == 0.0).astype(np.float64)
    return SubStochastic(SparseMatrix._wrap(pbar), c)


def out_degree_weights(g: Graph) -> np.ndarray:
    return degrees(g).out_degrees


def in_degree_weights(g: Graph) -> np.ndarray:
    return g.adjacency.transpose().matvec(np.ones(g.n))


def total_degree_weights(g: Graph) -> np.ndarray:
    return out_degree_weights(g) + in_degree_weights(g)


def make_operator(base: SubStochastic, mode: str, dist=None) -> StochasticOperator:
    """Patch a sub-stochastic walk into a stochastic operator.

    mode 'strong' reinforces the teleportation distribution at dangling
    nodes, 'weak' uses an independent distribution, 'sink' keeps the walk in
    place, 'none' performs no correction (the operator is then only
    sub-stochastic).
    """
    return StochasticOperator(base=base, mode=mode, dist=dist)


@dataclass(frozen=True, eq=False)
class DirichletReduction:
    """Pseudo problem on the free nodes plus the bookkeeping to re-insert the
    boundary values."""

    problem: PseudoProblem
    kept: np.ndarray
    boundary_nodes: np.ndarray
    boundary_values: np.ndarray
    n: int

    def expand(self, y) -> np.ndarray:
        """Scatter a reduced solution back to all n nodes, boundary included."""
        x = np.zeros(self.n)
        x[self.kept] = y
        x[self.boundary_nodes] = self.boundary_values
        return x


def dirichlet_reduce(p, s, b, v, alpha: float) -> DirichletReduction:
    """Fix nodes ``s`` to boundary values ``b`` and reduce to a pseudo
    problem on the complement: pbar = P[keep, keep] and
    f = (1 - alpha) v[keep] + alpha P[keep, s] b.
    """
    if isinstance(p, StochasticOperator):
        mat = p.to_sparse().csc
    elif isinstance(p, SubStochastic):
        mat = p.pbar.csc
    else:
        raise ValidationError("expected a StochasticOperator or SubStochastic")
    n = mat.shape[0]
    if not 0.0 < alpha < 1.0:
        raise ValidationError("alpha must lie in (0, 1)")
    s = np.unique(np.asarray(s, dtype=np.int64)).reshape(-1)
    if s.size and (s.min() < 0 or s.max() >= n):
        raise ValidationError("boundary node index out of range")
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if b.shape != s.shape:
        raise ValidationError("one boundary value per boundary node required")
    if not np.all(np.isfinite(b)):
        raise ValidationError("boundary values must be finite")
    v = _check_probability(v, n)
    if np.any(v[s] != 0.0):
        raise ValidationError("teleportation vector must be zero on the boundary set")

    kept = np.setdiff1d(np.arange(n), s)
    sub = mat[kept, :][:, kept]
    f = (1.0 - alpha) * v[kept]
    if s.size:
        f = f + alpha * (mat[kept, :][:, s] @ b)
    if np.any(f < 0):
        raise ValidationError(
            "boundary values produce a negative right-hand side; "
            "the reduced problem needs f >= 0"
        )
    csums = np.asarray(sub.sum(axis=0)).ravel()
    reduced = SubStochastic(SparseMatrix._wrap(sub), np.maximum(1.0 - csums, 0.0))
    problem = PseudoProblem(alpha=alpha, pbar=reduced, f=f)
    return DirichletReduction(
        problem=problem, kept=kept, boundary_nodes=s, boundary_values=b, n=n
    )


def undirected_stationary(g: Graph) -> np.ndarray:
    """Stationary distribution d / (e^T d) of the walk on a connected
    undirected graph; verified against the walk operator before returning."""
    if not is_symmetric(g.adjacency):
        raise ValidationError("undirected_stationary requires an undirected graph")
    if g.adjacency.nnz == 0:
        raise ValidationError("graph must have at least one edge")
    if connected_components(g) != 1:
        raise ValidationError("graph must be connected")
    d = degrees(g).out_degrees
    x = d / d.sum()
    resid = np.abs(random_walk(g).apply(x) - x).sum()
    if resid > 1e-12:
        raise ConvergenceError(f"stationary self-check failed (residual {resid:.3e})")
    return x
