"""PageRank and pseudo-PageRank linear solves.

Both problems are solved by the classical fixed-point (Richardson) sweep
x <- alpha P x + (1 - alpha) v. The residual r = x_next - x yields the
certificate ||x* - x||_1 <= ||r||_1 / (1 - alpha), which drives the stopping
rule, so a converged solve carries a guaranteed 1-norm error bound. A dense
LU oracle is provided for cross-checks at desk scale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .core import ConvergenceError, ValidationError

if TYPE_CHECKING:  # avoid an import cycle; operators are duck-typed here
    from .construct import StochasticOperator, SubStochastic

DEFAULT_ALPHA = 0.85
DEFAULT_TOL = 1e-10
SUM_TOL = 1e-12
ORACLE_MAX_N = 2000


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must lie in (0, 1), got {alpha}")
    return alpha


@dataclass(frozen=True, eq=False)
class PageRankProblem:
    """Data (alpha, P, v) of the linear system (I - alpha P) x = (1 - alpha) v
    with column-stochastic P and a probability vector v."""

    alpha: float
    operator: "StochasticOperator"
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        v = np.asarray(self.v, dtype=np.float64)
        n = self.operator.n
        if v.shape != (n,):
            raise ValidationError(f"teleportation vector must have length {n}")
        if not np.all(np.isfinite(v)) or np.any(v < 0):
            raise ValidationError("teleportation vector must be nonnegative and finite")
        if abs(v.sum() - 1.0) > SUM_TOL:
            raise ValidationError(f"teleportation vector must sum to 1 (got {v.sum():.17g})")
        object.__setattr__(self, "v", v)


@dataclass(frozen=True, eq=False)
class PseudoProblem:
    """Data (alpha, pbar, f) of (I - alpha pbar) y = f with column
    sub-stochastic pbar and nonnegative, nonzero f."""

    alpha: float
    pbar: "SubStochastic"
    f: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", _check_alpha(self.alpha))
        f = np.asarray(self.f, dtype=np.float64)
        if f.shape != (self.pbar.n,):
            raise ValidationError(f"f must have length {self.pbar.n}")
        if not np.all(np.isfinite(f)) or np.any(f < 0):
            raise ValidationError("f must be nonnegative and finite")
        if not np.any(f):
            raise ValidationError("f must be nonzero")
        object.__setattr__(self, "f", f)


@dataclass(frozen=True, eq=False)
class Solution:
    """Score vector with iteration count, final residual 1-norm, and the
    scale metadata recorded by renormalization."""

    x: np.ndarray
    iterations: int
    residual_1norm: float
    kind: str  # "pagerank" | "pseudo"
    scale: float = 1.0


def iteration_cap(alpha: float, tol: float) -> int:
    """Iterations guaranteed to reach the residual stopping rule (the
    residual itself contracts by alpha per sweep from ||r0||_1 <= 2 alpha)."""
    return math.ceil(math.log(tol * (1.0 - alpha) / 2.0) / math.log(alpha)) + 8


def iterates(p: PageRankProblem, start: str = "v"):
    """Yield the fixed-point iterates x(0), x(1), ... (x(0) included)."""
    if start not in ("v", "zero"):
        raise ValidationError("start must be 'v' or 'zero'")
    x = p.v.copy() if start == "v" else np.zeros_like(p.v)
    base = (1.0 - p.alpha) * p.v
    while True:
        yield x
        x = p.alpha * p.operator.apply(x) + base


def solve(p: PageRankProblem, tol: float = DEFAULT_TOL, start: str = "v") -> Solution:
    """Solve the PageRank system to a guaranteed 1-norm error of ``tol``.

    Iterates x <- alpha P x + (1 - alpha) v from x = v (default, usually
    faster) or x = 0, stopping once ||r||_1 / (1 - alpha) <= tol. Raises
    ConvergenceError with the residual history if the iteration cap is hit,
    which cannot happen for valid inputs.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if start not in ("v", "zero"):
        raise ValidationError("start must be 'v' or 'zero'")
    alpha, v = p.alpha, p.v
    x = v.copy() if start == "v" else np.zeros_like(v)
    base = (1.0 - alpha) * v
    cap = iteration_cap(alpha, tol)
    history = []
    for k in range(1, cap + 1):
        x_next = alpha * p.operator.apply(x) + base
        rnorm = float(np.abs(x_next - x).sum())
        history.append(rnorm)
        x = x_next
        if rnorm / (1.0 - alpha) <= tol:
            return Solution(x=x, iterations=k, residual_1norm=rnorm, kind="pagerank")
    raise ConvergenceError(
        f"PageRank iteration failed to converge within {cap} iterations", history
    )


def solve_pseudo(p: PseudoProblem, tol: float = DEFAULT_TOL) -> Solution:
    """Solve (I - alpha pbar) y = f with the same sweep, started from
    f / (1 - alpha); the converged iterate satisfies
    ||y* - y||_1 <= tol * e^T f / (1 - alpha)."""
    if tol <= 0:
        raise ValidationError("tol must be positive")
    alpha, f = p.alpha, p.f
    fmass = f.sum()
    y = f / (1.0 - alpha)
    cap = iteration_cap(alpha, tol)
    threshold = tol * fmass
    history = []
    for k in range(1, cap + 1):
        y_next = alpha * p.pbar.apply(y) + f
        rnorm = float(np.abs(y_next - y).sum())
        history.append(rnorm)
        y = y_next
        if rnorm <= threshold:
            return Solution(x=y, iterations=k, residual_1norm=rnorm, kind="pseudo")
    raise ConvergenceError(
        f"pseudo-PageRank iteration failed to converge within {cap} iterations", history
    )


def normalize_to_pagerank(sol: Solution) -> Solution:
    """Rescale a pseudo solution to sum to 1; the implied scale e^T y is
    recorded on the returned solution."""
    total = float(sol.x.sum())
    if total <= 0.0:
        raise ValidationError("cannot normalize a zero pseudo-PageRank vector")
    return Solution(
        x=sol.x / total,
        iterations=sol.iterations,
        residual_1norm=sol.residual_1norm / total,
        kind="pagerank",
        scale=total,
    )


def solve_dense_oracle(alpha, P_dense, v, rhs=None) -> np.ndarray:
    """Direct dense solve of (I - alpha P) x = rhs (default (1 - alpha) v) by
    LU with partial pivoting. Test oracle; limited to n <= 2000."""
    P = np.asarray(P_dense)
    n = P.shape[0]
    if P.shape != (n, n):
        raise ValidationError("P_dense must be square")
    if n > ORACLE_MAX_N:
        raise ValidationError(f"dense oracle limited to n <= {ORACLE_MAX_N}")
    v = np.asarray(v)
    if rhs is None:
        rhs = (1.0 - alpha) * v
    return np.linalg.solve(np.eye(n) - alpha * P, rhs)


def format_scores(x: np.ndarray) -> str:
    """TSV serialization 'node<TAB>score', 17 significant digits, ascending
    node id."""
    lines = [f"{i}\t{val:.17g}" for i, val in enumerate(np.asarray(x))]
    return "\n".join(lines) + ("\n" if lines else "")
