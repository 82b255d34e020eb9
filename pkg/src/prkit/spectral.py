"""Spectral structure of walks on undirected graphs, and damping limits.

Dense eigensolvers only (n <= 2000): the Fiedler pair of the pencil
(D - A) q = lambda D q, seeded indicator vectors solved through the shifted
pencil [(D - A) - gamma D] r = rho D s (over-teleportation gamma above the
Fiedler value is allowed), the shift that removes negative right-hand sides,
and the damping -> 1 limit of the score vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse.csgraph as csgraph

from .core import Graph, ValidationError, connected_components, is_symmetric
from .solver import solve_dense_oracle

DENSE_MAX_N = 2000
GAP_TOL = 1e-8


def _require_undirected_connected(g: Graph, op_name: str, min_n: int = 1) -> None:
    if not is_symmetric(g.adjacency):
        raise ValidationError(f"{op_name} requires an undirected graph")
    if g.n < min_n:
        raise ValidationError(f"{op_name} requires at least {min_n} nodes")
    if g.n > DENSE_MAX_N:
        raise ValidationError(f"{op_name} uses dense eigensolvers; limited to n <= {DENSE_MAX_N}")
    if connected_components(g) != 1:
        raise ValidationError(f"{op_name} requires a connected graph")


def _pencil_eigh(g: Graph):
    """Eigen-decomposition of (D - A) q = lambda D q via the symmetric
    reduction D^{-1/2} (D - A) D^{-1/2}; returns (evals ascending, Q, d)
    with columns of Q the pencil eigenvectors, q_i^T D q_j = delta_ij."""
    A = g.adjacency.toarray()
    d = A.sum(axis=1)
    inv_sqrt = 1.0 / np.sqrt(d)
    lsym = np.eye(g.n) - (A * inv_sqrt[:, None]) * inv_sqrt[None, :]
    evals, U = np.linalg.eigh(lsym)
    return evals, U * inv_sqrt[:, None], d


@dataclass(frozen=True, eq=False)
class FiedlerResult:
    """Smallest positive generalized eigenpair of (D - A) q = lambda D q,
    with q normalized to q^T D q = 1 (and hence q^T D e = 0)."""

    lambda_star: float
    q: np.ndarray
    multiplicity: int
    residual: float


def fiedler(g: Graph) -> FiedlerResult:
    """Fiedler value and vector of a connected undirected graph.

    The trivial eigenvector (proportional to e) is deflated; multiplicity
    counts how many eigenvalues sit within 1e-8 of lambda*, so symmetric
    graphs with a degenerate Fiedler value are reported rather than hidden.
    """
    _require_undirected_connected(g, "fiedler", min_n=2)
    evals, Q, d = _pencil_eigh(g)
    lam = float(evals[1])
    if lam < GAP_TOL:
        raise ValidationError(
            "Fiedler value is numerically zero (multiple components or a degenerate pencil)"
        )
    multiplicity = int(np.sum(np.abs(evals[1:] - lam) <= GAP_TOL))
    q = Q[:, 1].copy()
    if q[np.argmax(np.abs(q))] < 0:  # deterministic sign
        q = -q
    residual = float(np.linalg.norm((d * q - g.adjacency.toarray() @ q) - lam * d * q))
    return FiedlerResult(lambda_star=lam, q=q, multiplicity=multiplicity, residual=residual)


@dataclass(frozen=True, eq=False)
class MovSpec:
    """Seed vector s with s^T D e = 0 and a shift gamma; the solution is
    normalized to unit D-norm (that scaling constant is the returned rho)."""

    s: np.ndarray
    gamma: float


@dataclass(frozen=True, eq=False)
class MovResult:
    r: np.ndarray
    rho: float
    gamma: float


def mov(g: Graph, spec: MovSpec) -> MovResult:
    """Solve [(D - A) - gamma D] r = rho(gamma) D s for the seeded vector r.

    Solved through the pencil eigenbasis, which realizes the gamma = 0 case
    as the pseudo-inverse (minimum-D-norm) solution by deflating the trivial
    eigenvector, and permits over-teleportation gamma > lambda* as long as
    gamma is not an eigenvalue. rho is fixed by ||r||_D = 1.
    """
    _require_undirected_connected(g, "mov", min_n=2)
    s = np.asarray(spec.s, dtype=np.float64)
    if s.shape != (g.n,):
        raise ValidationError(f"seed vector must have length {g.n}")
    gamma = float(spec.gamma)
    evals, Q, d = _pencil_eigh(g)
    smag = np.linalg.norm(s)
    if abs(s @ d) > 1e-10 * max(1.0, smag * np.linalg.norm(d)):
        raise ValidationError("seed vector must satisfy s^T D e = 0")
    scale = max(1.0, float(evals[-1]))
    if np.min(np.abs(evals[1:] - gamma)) <= 1e-12 * scale:
        raise ValidationError(f"gamma = {gamma} coincides with a pencil eigenvalue")
    shat = Q.T @ (d * s)  # q_i^T D s
    coeff = np.zeros(g.n)
    coeff[1:] = shat[1:] / (evals[1:] - gamma)  # trivial component deflated
    norm = np.linalg.norm(coeff)  # equals ||r_raw||_D
    if norm == 0.0:
        return MovResult(r=np.zeros(g.n), rho=0.0, gamma=gamma)
    return MovResult(r=(Q @ coeff) / norm, rho=1.0 / norm, gamma=gamma)


def shift_nonneg(f, d, alpha: float):
    """Smallest sigma >= 0 with f + sigma d >= 0, exploiting that the walk
    on an undirected graph maps the degree vector to itself: solving with
    the shifted right side and subtracting sigma / (1 - alpha) d afterwards
    recovers the solution for the original f (see ``unshift``)."""
    f = np.asarray(f, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if f.shape != d.shape:
        raise ValidationError("f and d must have equal length")
    if np.any(d <= 0):
        raise ValidationError("shift requires strictly positive degrees")
    if not np.all(np.isfinite(f)):
        raise ValidationError("f must be finite")
    if not 0.0 < alpha < 1.0:
        raise ValidationError("alpha must lie in (0, 1)")
    sigma = max(0.0, float(np.max(-f / d))) if f.size else 0.0
    shifted = f + sigma * d
    np.maximum(shifted, 0.0, out=shifted)  # clear roundoff dust at the binding entry
    return shifted, sigma


def unshift(y, sigma: float, d, alpha: float) -> np.ndarray:
    """Undo ``shift_nonneg`` on a solved vector: y - sigma / (1 - alpha) d."""
    return np.asarray(y, dtype=np.float64) - (sigma / (1.0 - alpha)) * np.asarray(d)


@dataclass(frozen=True, eq=False)
class AlphaLimitSweep:
    """Score vectors x(1 - eps) for a decreasing sequence of eps, plus the
    1-norm differences between consecutive vectors (Cauchy diagnostics)."""

    alphas: np.ndarray
    vectors: list
    cauchy_diffs: np.ndarray


def limit_alpha_to_one(P, v, eps_list) -> AlphaLimitSweep:
    """Evaluate x(1 - eps) for each eps via the dense oracle.

    Requires the chain of P to be irreducible (checked by reachability), in
    which case the limit is its stationary distribution; reducible chains are
    refused since their limit is a projection outside this module's scope.
    """
    eps = np.asarray(list(eps_list), dtype=np.float64)
    if eps.size == 0 or np.any(eps <= 0) or np.any(eps >= 1):
        raise ValidationError("eps values must lie in (0, 1)")
    mat = P.to_sparse()
    n = mat.n_rows
    if n > DENSE_MAX_N:
        raise ValidationError(f"limit sweep limited to n <= {DENSE_MAX_N}")
    ncomp, _ = csgraph.connected_components(mat.csc, directed=True, connection="strong")
    if ncomp != 1:
        raise ValidationError("limit sweep requires an irreducible chain")
    v = np.asarray(v, dtype=np.float64)
    dense = mat.toarray()
    vectors = [solve_dense_oracle(1.0 - e, dense, v) for e in eps]
    diffs = np.array(
        [np.abs(vectors[i + 1] - vectors[i]).sum() for i in range(len(vectors) - 1)]
    )
    return AlphaLimitSweep(alphas=1.0 - eps, vectors=vectors, cauchy_diffs=diffs)
