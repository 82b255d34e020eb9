"""Sparse-graph PageRank toolkit.

Walk constructions, certified fixed-point solvers, damped power-series
diffusions, spectral limits on undirected graphs, censored-chain
equivalences, Kronecker-product alignment, and Ulam networks of the Chirikov
typical map, with a batch CLI (``prkit``) on top.
"""

from .core import (
    ConvergenceError,
    DegreeInfo,
    Graph,
    ParseError,
    SparseMatrix,
    ValidationError,
    degrees,
    load_graph,
    matvec,
    parse_edge_list,
    symmetrize,
    transpose,
)
from .construct import (
    DirichletReduction,
    StochasticOperator,
    SubStochastic,
    dirichlet_reduce,
    make_operator,
    random_walk,
    reverse_walk,
    undirected_stationary,
    weighted_walk,
)
from .solver import (
    PageRankProblem,
    PseudoProblem,
    Solution,
    normalize_to_pagerank,
    solve,
    solve_dense_oracle,
    solve_pseudo,
)
from .generalized import (
    ComplexSolution,
    DampingSequence,
    damped_sum,
    expected_pagerank,
    heat_kernel,
    solve_complex,
    totalrank,
    uniform_moments,
)
from .spectral import (
    AlphaLimitSweep,
    FiedlerResult,
    MovResult,
    MovSpec,
    fiedler,
    limit_alpha_to_one,
    mov,
    shift_nonneg,
    unshift,
)
from .censored import (
    AugmentedChain,
    ColleyResult,
    censored_node_problem,
    censored_stationary,
    colley,
)
from .isorank import (
    IsorankResult,
    KronOperator,
    greedy_match,
    isorank,
    isorank_solve,
    kron_apply,
)
from .ulam import ChirikovConfig, build_ulam, chirikov_step, render_heatmap

__version__ = "0.1.0"
