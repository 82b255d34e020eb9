"""Damped power-series generalizations of the PageRank solve.

Evaluates z = sum_k gamma_k P^k f by forward accumulation (a running power
applied to f; the matrix power itself is never formed) for any nonnegative
summable weight sequence with a certified tail bound: geometric weights
recover PageRank, 1/((k+1)(k+2)) integrates over all damping values,
beta^k/k! gives the heat kernel, and moment differences of a random damping
parameter give its expected score vector. Complex damping parameters are
solved by the same sweep in complex arithmetic together with the norm bound
|1 - alpha| / (1 - |alpha|).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .core import ConvergenceError, ValidationError
from .solver import _check_alpha

DENSE_FASTPATH_N = 128
MAX_TERMS = 20_000_000


class DampingSequence:
    """Nonnegative weights gamma_k with sum_k gamma_k < inf and a certified
    upper bound tail(k) >= sum_{j>k} gamma_j used to truncate series."""

    def __init__(self, weights: Callable[[], Iterator[float]], tail, name: str = "custom"):
        if tail is None:
            raise ValidationError(
                f"damping sequence {name!r} has no tail bound; truncation cannot be certified"
            )
        self._weights = weights
        self.tail = tail
        self.name = name

    def weights(self) -> Iterator[float]:
        return self._weights()

    @classmethod
    def geometric(cls, alpha: float) -> "DampingSequence":
        """gamma_k = alpha^k; the plain PageRank weights."""
        alpha = _check_alpha(alpha)

        def gen():
            g = 1.0
            while True:
                yield g
                g *= alpha

        return cls(gen, lambda k: alpha ** (k + 1) / (1.0 - alpha), f"geometric({alpha})")

    @classmethod
    def totalrank(cls) -> "DampingSequence":
        """gamma_k = 1/(k+1) - 1/(k+2); tail telescopes to 1/(K+2)."""

        def gen():
            k = 0
            while True:
                yield 1.0 / ((k + 1) * (k + 2))
                k += 1

        return cls(gen, lambda k: 1.0 / (k + 2), "totalrank")

    @classmethod
    def heat(cls, beta: float) -> "DampingSequence":
        """gamma_k = beta^k / k!; series regime requires 0 <= beta <= 30."""
        beta = float(beta)
        if not 0.0 <= beta <= 30.0:
            raise ValidationError("heat kernel requires 0 <= beta <= 30")

        def gen():
            g = 1.0
            k = 0
            while True:
                yield g
                k += 1
                g *= beta / k

        def tail(k):
            # sum_{j>k} beta^j/j! <= (beta^{k+1}/(k+1)!) / (1 - beta/(k+2))
            if k + 2 <= beta:
                return math.inf
            lead = math.exp((k + 1) * math.log(beta) - math.lgamma(k + 2)) if beta > 0 else 0.0
            return lead / (1.0 - beta / (k + 2))

        return cls(gen, tail, f"heat({beta})")

    @classmethod
    def from_moments(cls, moments) -> "DampingSequence":
        """gamma_k = m(k) - m(k+1) for nonincreasing moments m(k) in [0, 1]
        (m(k) = E[A^k] of a damping random variable A on [0, 1])."""
        if callable(moments):
            m = moments
        else:
            seq = [float(x) for x in moments]

            def m(k, _seq=seq):
                if k >= len(_seq):
                    raise ValidationError("moment list exhausted before the tail certified")
                return _seq[k]

        def checked(k):
            val = float(m(k))
            if not 0.0 <= val <= 1.0:
                raise ValidationError(f"moment E[A^{k}] = {val} outside [0, 1]")
            return val

        def gen():
            prev = checked(0)
            k = 0
            while True:
                nxt = checked(k + 1)
                if nxt > prev + 1e-15:
                    raise ValidationError(f"moments must be nonincreasing (E[A^{k+1}] > E[A^{k}])")
                yield max(prev - nxt, 0.0)
                prev = nxt
                k += 1

        return cls(gen, lambda k: checked(k + 1), "moments")

    @classmethod
    def custom(cls, gammas) -> "DampingSequence":
        """Finitely many explicit weights; the tail bound is the exact
        remaining partial sum."""
        g = np.asarray(list(gammas), dtype=np.float64)
        if g.size and (np.any(g < 0) or not np.all(np.isfinite(g))):
            raise ValidationError("damping weights must be nonnegative and finite")
        suffix = np.concatenate([np.cumsum(g[::-1])[::-1], [0.0]])

        def gen():
            yield from g

        return cls(gen, lambda k: float(suffix[min(k + 1, g.size)]), "custom")


def _series_matvec(op):
    """Matvec closure for a SubStochastic or StochasticOperator; small
    operators run dense with rotating buffers, which keeps million-term
    series affordable."""
    if op.n <= DENSE_FASTPATH_N:
        dense = op.to_dense()
        buf = [np.empty(op.n)]

        def matvec(w, _dense=dense, _buf=buf):
            out = _buf[0]
            np.dot(_dense, w, out=out)
            _buf[0] = w  # recycle the old vector as the next buffer
            return out

        return matvec
    return op.apply


def damped_sum_stats(seq: DampingSequence, op, f, tol: float = 1e-10, max_terms: int = MAX_TERMS):
    """As :func:`damped_sum`, also returning the number of terms used and the
    certified truncation bound: (z, terms, bound)."""
    if tol <= 0:
        raise ValidationError("tol must be positive")
    f = np.asarray(f, dtype=np.float64)
    if f.shape != (op.n,):
        raise ValidationError(f"f must have length {op.n}")
    if not np.all(np.isfinite(f)) or np.any(f < 0):
        raise ValidationError("f must be nonnegative and finite")
    fmass = float(f.sum())
    matvec = _series_matvec(op)
    weights = seq.weights()

    g0 = next(weights)
    if g0 < 0:
        raise ValidationError("damping weights must be nonnegative")
    w = f.copy()
    z = g0 * f
    term = np.empty_like(f)
    tail = seq.tail
    k = 0
    # remainder after K terms is at most tail(K) * ||P^K f||_1 because a
    # sub-stochastic matrix never increases the mass of a nonnegative vector
    wmass = fmass
    while tail(k) * wmass > tol:
        k += 1
        if k > max_terms:
            raise ConvergenceError(
                f"damped sum for {seq.name!r} not certified after {max_terms} terms"
            )
        try:
            g = next(weights)
        except StopIteration:
            break  # finite sequence exhausted; tail bound should already be 0
        if g < 0:
            raise ValidationError("damping weights must be nonnegative")
        w = matvec(w)
        wmass = float(w.sum())
        np.multiply(w, g, out=term)
        np.add(z, term, out=z)
    return z, k + 1, tail(k) * wmass


def damped_sum(seq: DampingSequence, op, f, tol: float = 1e-10, max_terms: int = MAX_TERMS) -> np.ndarray:
    """Evaluate z = sum_k gamma_k op^k f, truncated once
    tail(K) * ||op^K f||_1 <= tol, which certifies a 1-norm truncation error
    of at most tol for sub-stochastic op (the running power's mass can only
    shrink, so nilpotent or leaky chains terminate early)."""
    z, _, _ = damped_sum_stats(seq, op, f, tol, max_terms)
    return z


def totalrank(pbar, v, tol: float = 1e-6) -> np.ndarray:
    """Damping-averaged score vector: the damped sum with weights
    1/(k+1) - 1/(k+2), equal to the integral of the PageRank vector over all
    damping values in [0, 1]. The 1/K tail makes small tolerances expensive;
    the default certifies 1e-6."""
    return damped_sum(DampingSequence.totalrank(), pbar, v, tol)


def heat_kernel(beta: float, pbar, f, tol: float = 1e-10) -> np.ndarray:
    """z = exp(beta * pbar) f via the truncated exponential series."""
    return damped_sum(DampingSequence.heat(beta), pbar, f, tol)


def expected_pagerank(moments, P, v, tol: float = 1e-10) -> np.ndarray:
    """Expected PageRank under a random damping parameter A:
    E[x(A)] = sum_k (E[A^k] - E[A^{k+1}]) P^k v, with ``moments`` either a
    callable k -> E[A^k] or a (long enough) list of moments."""
    return damped_sum(DampingSequence.from_moments(moments), P, v, tol)


def uniform_moments(a: float, b: float) -> Callable[[int], float]:
    """Moment function of A ~ Uniform[a, b] within [0, 1]."""
    if not 0.0 <= a < b <= 1.0:
        raise ValidationError("uniform damping support must satisfy 0 <= a < b <= 1")

    def m(k):
        return (b ** (k + 1) - a ** (k + 1)) / ((k + 1) * (b - a))

    return m


@dataclass(frozen=True, eq=False)
class ComplexSolution:
    """Complex-damping solve result; the 1-norm never exceeds ``bound``."""

    x: np.ndarray
    bound: float
    iterations: int
    residual_1norm: float


def solve_complex(alpha, P, v, tol: float = 1e-10) -> ComplexSolution:
    """Solve (I - alpha P) x = (1 - alpha) v for complex alpha, |alpha| < 1,
    by the fixed-point sweep in complex arithmetic, and certify the norm
    bound ||x||_1 <= |1 - alpha| / (1 - |alpha|)."""
    a = complex(alpha)
    mod = abs(a)
    if mod >= 1.0:
        raise ValidationError(f"complex alpha must satisfy |alpha| < 1, got |alpha| = {mod}")
    if tol <= 0:
        raise ValidationError("tol must be positive")
    v = np.asarray(v, dtype=np.float64)
    if not np.all(np.isfinite(v)) or np.any(v < 0) or abs(v.sum() - 1.0) > 1e-12:
        raise ValidationError("teleportation vector must be a probability vector")

    bound = abs(1.0 - a) / (1.0 - mod)
    x = v.astype(np.complex128)
    base = (1.0 - a) * v
    if mod == 0.0:
        return ComplexSolution(x=base.copy(), bound=bound, iterations=1, residual_1norm=0.0)
    cap = math.ceil(math.log(tol * (1.0 - mod) / 2.0) / math.log(mod)) + 8
    history = []
    for k in range(1, cap + 1):
        x_next = a * P.apply(x) + base
        rnorm = float(np.abs(x_next - x).sum())
        history.append(rnorm)
        x = x_next
        if rnorm / (1.0 - mod) <= tol:
            norm1 = float(np.abs(x).sum())
            if norm1 > bound + 1e-10:
                raise ConvergenceError(
                    f"norm bound violated: ||x||_1 = {norm1} > {bound}", history
                )
            return ComplexSolution(x=x, bound=bound, iterations=k, residual_1norm=rnorm)
    raise ConvergenceError(f"complex solve failed to converge within {cap} iterations", history)
