"""Teleportation through an explicit extra state, and what censoring it buys.

An augmented chain routes every teleport step through a dedicated state;
censoring that state recovers the ordinary score vector. The same trick run
backwards turns a plain random walk on a graph with an added hub node into a
pseudo problem whose damping parameter is dictated by the degrees, and shows
the Colley rating system is such a problem in disguise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .core import ConvergenceError, Graph, SparseMatrix, ValidationError, degrees, is_symmetric
from .construct import SubStochastic, StochasticOperator, _check_probability, _col_divide
from .solver import PseudoProblem, solve_pseudo


@dataclass(frozen=True, eq=False)
class AugmentedChain:
    """Column-stochastic chain on n + 1 states: the base transitions plus a
    teleport state fed by each node's probability deficit and draining into
    the destination distribution v.

    kind 'uniform_exit' scales a stochastic operator by alpha so every node
    exits with probability 1 - alpha; 'degree_exit' wraps a sub-stochastic
    base whose correction vector is the exit row.
    """

    kind: str
    base: object
    v: np.ndarray
    alpha: float | None = None

    @classmethod
    def uniform_exit(cls, operator: StochasticOperator, v, alpha: float) -> "AugmentedChain":
        if not 0.0 < alpha < 1.0:
            raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
        v = _check_probability(v, operator.n, "destination distribution")
        return cls(kind="uniform_exit", base=operator, v=v, alpha=float(alpha))

    @classmethod
    def degree_exit(cls, g: Graph, v) -> "AugmentedChain":
        v = _check_probability(v, g.n, "destination distribution")
        sub = _exit_walk(g)
        return cls(kind="degree_exit", base=sub, v=v)

    @property
    def n(self) -> int:
        return self.base.n

    def apply(self, z: np.ndarray) -> np.ndarray:
        """One transition of the (n+1)-state chain; state n is the teleport
        state."""
        xn, xt = z[: self.n], z[self.n]
        if self.kind == "uniform_exit":
            top = self.alpha * self.base.apply(xn) + xt * self.v
            bottom = (1.0 - self.alpha) * xn.sum()
        else:
            top = self.base.apply(xn) + xt * self.v
            bottom = self.base.correction @ xn
        return np.concatenate([top, [bottom]])

    def to_dense(self) -> np.ndarray:
        """Materialized (n+1) x (n+1) matrix; oracle/test helper."""
        n = self.n
        out = np.zeros((n + 1, n + 1))
        if self.kind == "uniform_exit":
            out[:n, :n] = self.alpha * self.base.to_dense()
            out[n, :n] = 1.0 - self.alpha
        else:
            out[:n, :n] = self.base.to_dense()
            out[n, :n] = self.base.correction
        out[:n, n] = self.v
        return out


def _exit_walk(g: Graph) -> SubStochastic:
    """Walk of the graph with one extra hub edge per node, restricted to the
    original nodes: pbar' = A^T (D + I)^{-1}, correction 1 / (d + 1)."""
    d = degrees(g).out_degrees
    pbar = _col_divide(g.adjacency.transpose().csc, d + 1.0)
    return SubStochastic(SparseMatrix._wrap(pbar), 1.0 / (d + 1.0))


def stationary_with_stats(chain: AugmentedChain, tol: float = 1e-13, cap: int = 1_000_000):
    """As :func:`censored_stationary`, also returning the iteration count and
    the final step 1-norm: (x, iterations, residual)."""
    if tol <= 0:
        raise ValidationError("tol must be positive")
    n = chain.n
    z = np.full(n + 1, 1.0 / (n + 1))
    history = []
    for k in range(1, cap + 1):
        z_next = 0.5 * (z + chain.apply(z))
        rnorm = float(np.abs(z_next - z).sum())
        history.append(rnorm)
        z = z_next
        if rnorm <= tol:
            break
    else:
        raise ConvergenceError(
            f"augmented chain did not reach stationarity within {cap} iterations",
            history[-20:],
        )
    x = z[:n]
    total = x.sum()
    if total <= 0.0:
        raise ConvergenceError("stationary mass collapsed onto the teleport state", history[-20:])
    return x / total, k, rnorm


def censored_stationary(chain: AugmentedChain, tol: float = 1e-13, cap: int = 1_000_000) -> np.ndarray:
    """Stationary distribution of the augmented chain with the teleport state
    censored: power-iterate to stationarity, drop the extra state, and
    renormalize. The iteration averages each step with the identity, which
    leaves the stationary vector unchanged but rules out periodic cycling.
    """
    x, _, _ = stationary_with_stats(chain, tol, cap)
    return x


def censored_node_problem(g: Graph, v):
    """Pseudo problem hidden in the hub-node construction.

    The walk restricted to the original nodes is pbar' = A^T (D + I)^{-1},
    whose correction c = 1/(d+1) is strictly positive: every node leaks
    probability. Rescaling by the largest column sum yields a pseudo problem
    with alpha = 1 - min(c) (= d_max / (d_max + 1) on unweighted graphs);
    solving it and renormalizing reproduces the censored stationary
    distribution. Returns (problem, alpha).
    """
    if g.adjacency.nnz == 0:
        raise ValidationError("censored node construction requires at least one edge")
    v = _check_probability(v, g.n, "destination distribution")
    sub = _exit_walk(g)
    c = sub.correction
    # 1 - min(c), evaluated as the largest column sum d/(d+1) so the value
    # is the correctly rounded d_max/(d_max+1)
    d = degrees(g).out_degrees
    alpha = float(np.max(d / (d + 1.0)))
    pbar = SparseMatrix._wrap(sub.pbar.csc / alpha)
    scaled_c = np.maximum(1.0 - (1.0 - c) / alpha, 0.0)
    problem = PseudoProblem(alpha=alpha, pbar=SubStochastic(pbar, scaled_c), f=v)
    return problem, alpha


@dataclass(frozen=True, eq=False)
class ColleyResult:
    """Ratings r of (D + 2I - A) r = f, alongside the equivalent (shifted)
    pseudo problem, its damping parameter, and the shift used on f."""

    ratings: np.ndarray
    pseudo: PseudoProblem
    alpha: float
    sigma: float


def colley(g: Graph, f) -> ColleyResult:
    """Colley ratings of an undirected game graph with score differences f.

    Solves the symmetric positive definite system (D + 2I - A) r = f
    directly, then re-derives r through the equivalent pseudo problem
    (I - alpha pbar) y = f with y = (D + 2I) r, pbar = A (D + 2I)^{-1} / alpha
    and alpha = d_max / (d_max + 2). Negative entries of f are removed by a
    shift along (I - A (D + 2I)^{-1}) (d + 2e) = 2e before the solve and
    subtracted afterwards. The two routes are verified to agree.
    """
    if not is_symmetric(g.adjacency):
        raise ValidationError("colley requires an undirected game graph")
    if g.adjacency.nnz == 0:
        raise ValidationError("colley requires at least one game")
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (g.n,):
        raise ValidationError(f"score-difference vector must have length {g.n}")
    if not np.all(np.isfinite(f)):
        raise ValidationError("score differences must be finite")

    d = degrees(g).out_degrees
    A = g.adjacency.toarray()
    M = np.diag(d + 2.0) - A
    ratings = scipy.linalg.solve(M, f, assume_a="pos")

    alpha = float(d.max() / (d.max() + 2.0))
    pcols = _col_divide(g.adjacency.csc.copy(), d + 2.0)  # A (D + 2I)^{-1}, A symmetric
    pbar = SparseMatrix._wrap(pcols / alpha)
    colsum = d / (d + 2.0) / alpha
    sub = SubStochastic(pbar, np.maximum(1.0 - colsum, 0.0))

    sigma = max(0.0, float(np.max(-f)) / 2.0)
    shifted = f + 2.0 * sigma
    if not np.any(shifted):
        sigma += 1.0  # keep the pseudo problem's right side nonzero
        shifted = f + 2.0 * sigma
    np.maximum(shifted, 0.0, out=shifted)
    problem = PseudoProblem(alpha=alpha, pbar=sub, f=shifted)
    y = solve_pseudo(problem, tol=1e-13).x - sigma * (d + 2.0)
    via_pseudo = y / (d + 2.0)
    gap = float(np.max(np.abs(via_pseudo - ratings)))
    if gap > 1e-9 * max(1.0, float(np.max(np.abs(ratings)))):
        raise ConvergenceError(f"Colley cross-route mismatch: {gap:.3e}")
    return ColleyResult(ratings=ratings, pseudo=problem, alpha=alpha, sigma=sigma)
