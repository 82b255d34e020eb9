"""Ulam networks of the Chirikov typical map, and heatmap rendering.

The phase space [0, 2pi)^2 is covered by an N x N grid of half-open cells;
each cell is populated with s uniform sample points, every point is pushed
through T kicked-rotor steps with frozen random phases, and the landing
cells define weighted edges. All randomness flows from one seed through
named streams (one for the phases, one per cell), so graphs and rendered
images are reproducible byte for byte.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

from .core import Graph, SparseMatrix, ValidationError

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True, eq=False)
class ChirikovConfig:
    """Map and discretization parameters.

    eta is the dissipation, k the kick strength, T the number of random
    phases (drawn once here and frozen), N the cells per axis, s the samples
    per cell, and seed the root of every random stream.
    """

    eta: float = 0.99
    k: float = 0.22
    T: int = 10
    N: int = 64
    s: int = 200
    seed: int = 7
    phases: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.N < 2:
            raise ValidationError("grid needs N >= 2 cells per axis")
        if self.s < 1:
            raise ValidationError("need at least one sample per cell")
        if self.T < 1:
            raise ValidationError("need at least one map step")
        root = np.random.SeedSequence(self.seed)
        phase_seq, cell_seq = root.spawn(2)
        phases = np.random.Generator(np.random.PCG64(phase_seq)).random(self.T) * TWO_PI
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "_cell_seq", cell_seq)

    def cell_seeds(self):
        return self._cell_seq.spawn(self.N * self.N)


def chirikov_step(cfg: ChirikovConfig, x, y):
    """Push (x, y) through all T kicked-rotor updates
    y <- eta y + k sin(x + theta_t), x <- x + y, then wrap both coordinates
    into [0, 2pi). Accepts scalars or arrays."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("map inputs must be finite")
    for theta in cfg.phases:
        y = cfg.eta * y + cfg.k * np.sin(x + theta)
        x = x + y
    x = np.mod(x, TWO_PI)
    y = np.mod(y, TWO_PI)
    # np.mod can round up to the modulus itself for tiny negatives
    x = np.where(x >= TWO_PI, 0.0, x)
    y = np.where(y >= TWO_PI, 0.0, y)
    return x, y


def build_ulam(cfg: ChirikovConfig) -> Graph:
    """Sampled transfer-operator graph on N^2 nodes.

    Cell (ix, iy) is the box [2 pi ix / N, 2 pi (ix+1) / N) x [same in y] and
    maps to node ix * N + iy. The weight of edge a -> b counts the samples of
    cell a landing in cell b, so every node's out-weight is exactly s and the
    walk on this graph has no dangling nodes.
    """
    N, s = cfg.N, cfg.s
    h = TWO_PI / N
    xs = np.empty(N * N * s)
    ys = np.empty(N * N * s)
    for node, seq in enumerate(cfg.cell_seeds()):
        rng = np.random.Generator(np.random.PCG64(seq))
        u = rng.random((s, 2))
        ix, iy = divmod(node, N)
        xs[node * s : (node + 1) * s] = (ix + u[:, 0]) * h
        ys[node * s : (node + 1) * s] = (iy + u[:, 1]) * h
    fx, fy = chirikov_step(cfg, xs, ys)
    jx = np.minimum((fx / h).astype(np.int64), N - 1)
    jy = np.minimum((fy / h).astype(np.int64), N - 1)
    src = np.repeat(np.arange(N * N, dtype=np.int64), s)
    dst = jx * N + jy
    adjacency = SparseMatrix(N * N, N * N, src, dst, np.ones(src.size))
    return Graph(adjacency, directed=True)


def heatmap_pixels(scores: np.ndarray, N: int) -> np.ndarray:
    """Grayscale pixel grid: value round(255 (score / max)^(1/3)), row r is
    the y-cell index (row 0 = y near 0), column c the x-cell index."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (N * N,):
        raise ValidationError(f"scores must have length {N * N}")
    if np.any(scores < 0) or not np.all(np.isfinite(scores)):
        raise ValidationError("scores must be nonnegative and finite")
    peak = scores.max() if scores.size else 0.0
    if peak == 0.0:
        print("warning: all-zero scores render as a uniform black image", file=sys.stderr)
        return np.zeros((N, N), dtype=np.uint8)
    shade = np.rint(255.0 * np.cbrt(scores / peak)).astype(np.uint8)
    return shade.reshape(N, N).T  # node ix*N + iy -> pixel (row iy, col ix)


def render_heatmap(scores: np.ndarray, N: int, path) -> None:
    """Write the scores as a binary PGM (P5, maxval 255) image file."""
    img = heatmap_pixels(scores, N)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{N} {N}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
