"""Network alignment by PageRank on the Kronecker product of two walks.

The product operator is never materialized: its action on a similarity
matrix X is P X Q^T. Solving the usual linear system with a prior similarity
matrix as teleportation yields node-pair scores; a greedy pass extracts a
matching.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ConvergenceError, Graph, ValidationError
from .construct import StochasticOperator, make_operator, random_walk
from .solver import iteration_cap

SUM_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class KronOperator:
    """Implicit Kronecker product q (x) p of an n x n and an m x m operator;
    acts on n x m matrices as X -> P X Q^T."""

    p: StochasticOperator
    q: StochasticOperator


def kron_apply(op: KronOperator, X: np.ndarray) -> np.ndarray:
    """Apply the product operator: returns P X Q^T without ever forming the
    nm x nm matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape != (op.p.n, op.q.n):
        raise ValidationError(f"X must have shape {(op.p.n, op.q.n)}, got {X.shape}")
    return op.q.apply(op.p.apply(X).T).T


@dataclass(frozen=True, eq=False)
class IsorankResult:
    x: np.ndarray  # n x m similarity matrix
    iterations: int
    residual_1norm: float


def isorank_solve(p, q, alpha: float, V, tol: float = 1e-10) -> IsorankResult:
    """Similarity scores between the nodes of two walks.

    Solves (I - alpha q (x) p) vec(X) = (1 - alpha) vec(V) by the fixed-point
    sweep with the implicit product operator; V is the prior similarity
    matrix and must sum to 1. The result is nonnegative with total mass 1.
    """
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    op = KronOperator(p=p, q=q)
    V = np.asarray(V, dtype=np.float64)
    if V.shape != (p.n, q.n):
        raise ValidationError(f"teleportation matrix must have shape {(p.n, q.n)}")
    if not np.all(np.isfinite(V)) or np.any(V < 0):
        raise ValidationError("teleportation matrix must be nonnegative and finite")
    if abs(V.sum() - 1.0) > SUM_TOL:
        raise ValidationError(f"teleportation matrix must sum to 1 (got {V.sum():.17g})")

    X = V.copy()
    base = (1.0 - alpha) * V
    cap = iteration_cap(alpha, tol)
    history = []
    for k in range(1, cap + 1):
        X_next = alpha * kron_apply(op, X) + base
        rnorm = float(np.abs(X_next - X).sum())
        history.append(rnorm)
        X = X_next
        if rnorm / (1.0 - alpha) <= tol:
            return IsorankResult(x=X, iterations=k, residual_1norm=rnorm)
    raise ConvergenceError(f"alignment solve failed to converge within {cap} iterations", history)


def alignment_operators(ga: Graph, gb: Graph):
    """Stochastic walk operators for the two graphs; dangling nodes are
    patched with the uniform distribution so the product stays stochastic."""
    ops = []
    for g in (ga, gb):
        ops.append(make_operator(random_walk(g), "strong", np.full(g.n, 1.0 / g.n)))
    return tuple(ops)


def isorank(ga: Graph, gb: Graph, alpha: float = 0.85, V=None, tol: float = 1e-10) -> IsorankResult:
    """End-to-end alignment of two graphs; V defaults to uniform."""
    p, q = alignment_operators(ga, gb)
    if V is None:
        V = np.full((ga.n, gb.n), 1.0 / (ga.n * gb.n))
    return isorank_solve(p, q, alpha, V, tol)


def greedy_match(X: np.ndarray):
    """Extract a matching by repeatedly taking the largest entry and deleting
    its row and column; exact ties break toward the smallest (i, j) in
    lexicographic order."""
    X = np.asarray(X, dtype=np.float64)
    if np.any(X < 0):
        raise ValidationError("similarity matrix must be nonnegative")
    work = X.copy()
    pairs = []
    for _ in range(min(work.shape)):
        flat = np.argmax(work)  # first occurrence in C order = smallest (i, j)
        i, j = np.unravel_index(flat, work.shape)
        pairs.append((int(i), int(j)))
        work[i, :] = -np.inf
        work[:, j] = -np.inf
    return pairs
