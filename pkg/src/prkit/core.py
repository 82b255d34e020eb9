"""Sparse matrix and graph primitives shared by every other module.

Matrices are nonnegative and held in compressed-column (CSC) form. Graphs
and matrices are immutable once built, so they are safe to share across
threads. File I/O covers whitespace-separated edge lists and Matrix Market
coordinate files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.io
import scipy.sparse as sp
import scipy.sparse.csgraph as csgraph


class ValidationError(ValueError):
    """An input violates a documented precondition."""


class ParseError(ValueError):
    """A graph file could not be parsed; the message carries the line number."""


class ConvergenceError(RuntimeError):
    """An iteration exceeded its cap; carries the residual history."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class SparseMatrix:
    """Immutable nonnegative sparse matrix in compressed-column form.

    Built from (row, col, value) triplets: duplicate coordinates are summed,
    zero-weight entries are dropped, and negative or non-finite values are
    rejected. Values default to 1.0 when omitted.
    """

    __slots__ = ("_csc",)

    def __init__(self, n_rows, n_cols, rows=(), cols=(), values=None):
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if values is None:
            values = np.ones(rows.size)
        values = np.asarray(values, dtype=np.float64)
        if not (rows.size == cols.size == values.size):
            raise ValidationError("rows, cols and values must have equal length")
        if n_rows < 0 or n_cols < 0:
            raise ValidationError("matrix dimensions must be nonnegative")
        if rows.size:
            if rows.min() < 0 or rows.max() >= n_rows:
                raise ValidationError("row index out of range")
            if cols.min() < 0 or cols.max() >= n_cols:
                raise ValidationError("column index out of range")
        if not np.all(np.isfinite(values)):
            raise ValidationError("matrix values must be finite")
        if np.any(values < 0):
            raise ValidationError("matrix values must be nonnegative")
        keep = values > 0  # zero-weight edges are irrelevant
        coo = sp.coo_matrix(
            (values[keep], (rows[keep], cols[keep])), shape=(n_rows, n_cols)
        )
        csc = coo.tocsc()  # sums duplicates
        csc.sort_indices()
        object.__setattr__(self, "_csc", csc)

    @classmethod
    def _wrap(cls, mat) -> "SparseMatrix":
        """Adopt a scipy matrix produced by trusted internal arithmetic."""
        csc = sp.csc_matrix(mat)
        csc.sum_duplicates()
        csc.eliminate_zeros()
        csc.sort_indices()
        if csc.nnz and (csc.data.min() < 0 or not np.all(np.isfinite(csc.data))):
            raise ValidationError("matrix values must be finite and nonnegative")
        m = object.__new__(cls)
        object.__setattr__(m, "_csc", csc)
        return m

    def __setattr__(self, name, value):
        raise AttributeError("SparseMatrix is immutable")

    @property
    def n_rows(self) -> int:
        return self._csc.shape[0]

    @property
    def n_cols(self) -> int:
        return self._csc.shape[1]

    @property
    def nnz(self) -> int:
        return self._csc.nnz

    @property
    def csc(self):
        """Underlying ``scipy.sparse.csc_matrix`` (treat as read-only)."""
        return self._csc

    def matvec(self, x) -> np.ndarray:
        """Exact sparse product ``m @ x`` with per-column accumulation in
        index order, so repeated runs sum in the same order."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 1 or x.size != self.n_cols:
            raise ValidationError(
                f"matvec expects a vector of length {self.n_cols}, got shape {x.shape}"
            )
        return self._csc @ x

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix._wrap(self._csc.T)

    def toarray(self) -> np.ndarray:
        return self._csc.toarray()

    def col_sums(self) -> np.ndarray:
        return np.asarray(self._csc.sum(axis=0)).ravel()

    def triplets(self):
        """Return (rows, cols, values) sorted by (row, col)."""
        coo = self._csc.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]

    def equals(self, other) -> bool:
        """Exact structural and numerical equality."""
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        a, b = self._csc, other._csc
        return (
            a.shape == b.shape
            and np.array_equal(a.indptr, b.indptr)
            and np.array_equal(a.indices, b.indices)
            and np.array_equal(a.data, b.data)
        )

    __eq__ = equals

    def __ne__(self, other):
        eq = self.equals(other)
        return NotImplemented if eq is NotImplemented else not eq

    __hash__ = None

    def __repr__(self):
        return f"SparseMatrix({self.n_rows}x{self.n_cols}, nnz={self.nnz})"


@dataclass(frozen=True, eq=False)
class Graph:
    """A weighted directed graph; entry (i, j) of ``adjacency`` is the weight
    of edge i -> j. When ``directed`` is False the adjacency must equal its
    transpose exactly."""

    adjacency: SparseMatrix
    directed: bool = True

    def __post_init__(self):
        if self.adjacency.n_rows != self.adjacency.n_cols:
            raise ValidationError("adjacency matrix must be square")
        if not self.directed and not self.adjacency.equals(self.adjacency.transpose()):
            raise ValidationError("undirected graph requires a symmetric adjacency matrix")

    @property
    def n(self) -> int:
        return self.adjacency.n_rows


@dataclass(frozen=True, eq=False)
class DegreeInfo:
    """Out-degrees d = A e plus the exact zero-degree (dangling) mask."""

    out_degrees: np.ndarray
    dangling_mask: np.ndarray


def degrees(g: Graph) -> DegreeInfo:
    """Out-degree vector d = A e and the dangling mask (degree exactly 0)."""
    d = g.adjacency.matvec(np.ones(g.n))
    return DegreeInfo(out_degrees=d, dangling_mask=(d == 0.0))


def transpose(m: SparseMatrix) -> SparseMatrix:
    return m.transpose()


def matvec(m: SparseMatrix, x) -> np.ndarray:
    return m.matvec(x)


def is_symmetric(m: SparseMatrix) -> bool:
    return m.equals(m.transpose())


def symmetrize(g: Graph) -> Graph:
    """Undirected view of ``g`` with adjacency A + A^T (weights add)."""
    a = g.adjacency.csc
    return Graph(SparseMatrix._wrap(a + a.T), directed=False)


def connected_components(g: Graph, strong: bool = False) -> int:
    """Number of (weakly or strongly) connected components."""
    conn = "strong" if strong else "weak"
    ncomp, _ = csgraph.connected_components(g.adjacency.csc, directed=True, connection=conn)
    return ncomp


def _parse_edge_list(text: str, name: str):
    rows, cols, vals = [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise ParseError(f"{name}:{lineno}: expected 'src dst [weight]', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"{name}:{lineno}: node ids must be integers") from None
        if i < 0 or j < 0:
            raise ParseError(f"{name}:{lineno}: node ids must be nonnegative")
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise ParseError(f"{name}:{lineno}: weight must be a real number") from None
            if not np.isfinite(w):
                raise ValidationError(f"{name}:{lineno}: weight must be finite")
            if w < 0:
                raise ValidationError(f"{name}:{lineno}: negative edge weight {w}")
        else:
            w = 1.0
        rows.append(i)
        cols.append(j)
        vals.append(w)
    n = 1 + max(max(rows), max(cols)) if rows else 0
    return n, rows, cols, vals


def parse_edge_list(text: str, name: str = "<string>") -> Graph:
    """Parse an edge list ('src dst [weight]' per line, '#' comments, 0-based
    ids, default weight 1.0). Duplicate edges sum; node count = 1 + max id."""
    n, rows, cols, vals = _parse_edge_list(text, name)
    return Graph(SparseMatrix(n, n, rows, cols, vals), directed=True)


def format_edge_list(m: SparseMatrix) -> str:
    """Serialize to edge-list text; weights keep full float64 precision."""
    rows, cols, vals = m.triplets()
    lines = [f"{i} {j} {w:.17g}" for i, j, w in zip(rows, cols, vals)]
    return "\n".join(lines) + ("\n" if lines else "")


def _load_matrix_market(path: str) -> Graph:
    try:
        info = scipy.io.mminfo(path)
    except Exception as exc:
        raise ParseError(f"{path}: not a readable Matrix Market file ({exc})") from None
    field, symmetry = info[4], info[5]
    if field == "complex":
        raise ValidationError(f"{path}: complex Matrix Market files are not supported")
    mat = scipy.io.mmread(path)  # expands symmetric storage
    coo = sp.coo_matrix(mat)
    if coo.shape[0] != coo.shape[1]:
        raise ValidationError(f"{path}: adjacency matrix must be square")
    m = SparseMatrix(coo.shape[0], coo.shape[1], coo.row, coo.col, coo.data)
    return Graph(m, directed=(symmetry != "symmetric"))


def load_graph(path, fmt: str | None = None) -> Graph:
    """Load a graph from ``path``.

    ``fmt`` is 'edge-list' or 'matrix-market'; when None it is inferred from
    the suffix ('.mtx'/'.mm' means Matrix Market). Edge-list files are
    0-based; Matrix Market follows that format's 1-based convention.
    """
    path = str(path)
    if fmt is None:
        fmt = "matrix-market" if path.endswith((".mtx", ".mm")) else "edge-list"
    if fmt == "matrix-market":
        return _load_matrix_market(path)
    if fmt == "edge-list":
        with open(path, "r", encoding="utf-8") as fh:
            return parse_edge_list(fh.read(), name=path)
    raise ValidationError(f"unknown graph format {fmt!r}")


def save_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g.adjacency))
