"""Batch command-line interface.

Every subcommand reads graphs from files, writes delimited scores (TSV) or
PGM images, reports iteration counts and residuals on standard error, and
can optionally render a matplotlib figure next to the delimited output.
Exit codes: 0 success, 1 validation error, 2 convergence failure, 64 usage.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import construct, core, generalized, solver, spectral
from .censored import AugmentedChain, colley, stationary_with_stats
from .core import ConvergenceError, ParseError, ValidationError
from .isorank import greedy_match, isorank
from .ulam import ChirikovConfig, build_ulam, heatmap_pixels, render_heatmap

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONVERGENCE = 2
EXIT_USAGE = 64

CONSTRUCTIONS = ("random-walk", "strong", "weak", "sink", "reverse", "weighted", "dirichlet")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write_text(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _report(iterations, residual) -> None:
    print(f"iterations={iterations} residual={residual:.6e}", file=sys.stderr)


def _parse_id_list(text: str):
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of node ids, got {text!r}") from None


def _read_vector_file(path: str, n: int, what: str) -> np.ndarray:
    """Whitespace/TSV 'node value' lines into a length-n vector."""
    vec = np.zeros(n)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected 'node value'")
            try:
                i, val = int(parts[0]), float(parts[1])
            except ValueError:
                raise ParseError(f"{path}:{lineno}: bad {what} entry") from None
            if not 0 <= i < n:
                raise ValidationError(f"{path}:{lineno}: node {i} out of range for n={n}")
            vec[i] = val
    return vec


def _add_graph_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="graph file (edge list or Matrix Market)")
    p.add_argument("--format", choices=["auto", "edge-list", "matrix-market"], default="auto")
    p.add_argument("--undirected", action="store_true", help="symmetrize the loaded graph")


def _add_teleport_args(p: argparse.ArgumentParser) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--teleport", choices=["uniform"], default="uniform",
                       help="uniform teleportation (default)")
    group.add_argument("--teleport-file", help="TSV 'node value' teleportation vector")
    group.add_argument("--seed-nodes", help="comma-separated nodes; teleportation is uniform over them")


def _load_graph(args) -> core.Graph:
    fmt = None if args.format == "auto" else args.format
    g = core.load_graph(args.graph, fmt=fmt)
    if getattr(args, "undirected", False):
        g = core.symmetrize(g)
    return g


def _teleport_vector(args, n: int, zero_on=None) -> np.ndarray:
    zero_on = np.asarray(zero_on if zero_on is not None else [], dtype=np.int64)
    if getattr(args, "teleport_file", None):
        v = _read_vector_file(args.teleport_file, n, "teleportation")
    elif getattr(args, "seed_nodes", None):
        nodes = _parse_id_list(args.seed_nodes)
        if not nodes:
            raise ValidationError("--seed-nodes needs at least one node")
        v = np.zeros(n)
        v[np.asarray(nodes)] = 1.0 / len(nodes)
    else:
        v = np.zeros(n)
        keep = np.setdiff1d(np.arange(n), zero_on)
        if keep.size == 0:
            raise ValidationError("no nodes left to teleport to")
        v[keep] = 1.0 / keep.size
    return v


def _weight_vector(args, g: core.Graph) -> np.ndarray:
    if getattr(args, "weights_file", None):
        return _read_vector_file(args.weights_file, g.n, "weight")
    kind = getattr(args, "weights", "total")
    if kind == "total":
        return construct.total_degree_weights(g)
    if kind == "in":
        return construct.in_degree_weights(g)
    return construct.out_degree_weights(g)


def _base_walk(args, g: core.Graph) -> construct.SubStochastic:
    name = args.construction
    if name in ("random-walk", "strong", "weak", "sink"):
        return construct.random_walk(g)
    if name == "reverse":
        return construct.reverse_walk(g)
    if name == "weighted":
        return construct.weighted_walk(g, _weight_vector(args, g))
    raise ValidationError(f"construction {name!r} is not valid here")


def _stochastic_operator(args, g: core.Graph, v: np.ndarray) -> construct.StochasticOperator:
    base = _base_walk(args, g)
    name = args.construction
    if name == "weak":
        return construct.make_operator(base, "weak", np.full(g.n, 1.0 / g.n))
    if name == "sink":
        return construct.make_operator(base, "sink")
    return construct.make_operator(base, "strong", v)


def _save_figure(path: str, data, kind: str) -> None:
    import matplotlib

    matplotlib.use("Agg", force=True)
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if kind == "scores":
        ax.bar(np.arange(len(data)), np.asarray(data), width=0.8, color="0.3")
        ax.set_xlabel("node")
        ax.set_ylabel("score")
    elif kind == "matrix":
        im = ax.imshow(np.asarray(data), cmap="viridis", interpolation="nearest")
        fig.colorbar(im, ax=ax)
        ax.set_xlabel("graph B node")
        ax.set_ylabel("graph A node")
    else:  # pixel heatmap
        ax.imshow(np.asarray(data), cmap="gray", vmin=0, vmax=255, interpolation="nearest")
        ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def _maybe_figure(args, data, kind: str) -> None:
    if getattr(args, "figure", None):
        _save_figure(args.figure, data, kind)


def cmd_solve(args) -> int:
    g = _load_graph(args)
    if args.construction == "dirichlet":
        if args.boundary_nodes is None:
            raise ValidationError("dirichlet construction requires --boundary-nodes")
        s = _parse_id_list(args.boundary_nodes)
        b = ([float(t) for t in args.boundary_values.replace(",", " ").split()]
             if args.boundary_values else [0.0] * len(s))
        v = _teleport_vector(args, g.n, zero_on=s)
        op = construct.make_operator(construct.random_walk(g), "strong", v)
        red = construct.dirichlet_reduce(op, s, b, v, args.alpha)
        sol = solver.solve_pseudo(red.problem, tol=args.tol)
        x = red.expand(sol.x)
    else:
        v = _teleport_vector(args, g.n)
        op = _stochastic_operator(args, g, v)
        sol = solver.solve(solver.PageRankProblem(args.alpha, op, v), tol=args.tol)
        x = sol.x
    _report(sol.iterations, sol.residual_1norm)
    _write_text(solver.format_scores(x), args.out)
    _maybe_figure(args, x, "scores")
    return EXIT_OK


def cmd_pseudo(args) -> int:
    g = _load_graph(args)
    v = _teleport_vector(args, g.n)
    base = _base_walk(args, g)
    problem = solver.PseudoProblem(args.alpha, base, (1.0 - args.alpha) * v)
    sol = solver.solve_pseudo(problem, tol=args.tol)
    _report(sol.iterations, sol.residual_1norm)
    _write_text(solver.format_scores(sol.x), args.out)
    _maybe_figure(args, sol.x, "scores")
    return EXIT_OK


def cmd_totalrank(args) -> int:
    g = _load_graph(args)
    v = _teleport_vector(args, g.n)
    base = _base_walk(args, g)
    z, terms, bound = generalized.damped_sum_stats(
        generalized.DampingSequence.totalrank(), base, v, args.tol
    )
    _report(terms, bound)
    _write_text(solver.format_scores(z), args.out)
    _maybe_figure(args, z, "scores")
    return EXIT_OK


def cmd_heatkernel(args) -> int:
    g = _load_graph(args)
    v = _teleport_vector(args, g.n)
    base = _base_walk(args, g)
    z, terms, bound = generalized.damped_sum_stats(
        generalized.DampingSequence.heat(args.beta), base, v, args.tol
    )
    _report(terms, bound)
    _write_text(solver.format_scores(z), args.out)
    _maybe_figure(args, z, "scores")
    return EXIT_OK


def cmd_expected(args) -> int:
    g = _load_graph(args)
    v = _teleport_vector(args, g.n)
    op = _stochastic_operator(args, g, v)
    spec = args.dist
    if not spec.startswith("uniform:"):
        raise ValidationError("only --dist uniform:a,b is supported")
    try:
        a, b = (float(t) for t in spec.split(":", 1)[1].split(","))
    except ValueError:
        raise ValidationError(f"could not parse distribution {spec!r}") from None
    moments = generalized.uniform_moments(a, b)
    z, terms, bound = generalized.damped_sum_stats(
        generalized.DampingSequence.from_moments(moments), op, v, args.tol
    )
    _report(terms, bound)
    _write_text(solver.format_scores(z), args.out)
    _maybe_figure(args, z, "scores")
    return EXIT_OK


def cmd_complex(args) -> int:
    g = _load_graph(args)
    v = _teleport_vector(args, g.n)
    try:
        alpha = complex(args.alpha)
    except ValueError:
        raise ValidationError(f"could not parse complex alpha {args.alpha!r}") from None
    op = construct.make_operator(construct.random_walk(g), "strong", v)
    sol = generalized.solve_complex(alpha, op, v, tol=args.tol)
    _report(sol.iterations, sol.residual_1norm)
    print(f"norm_bound={sol.bound:.17g}", file=sys.stderr)
    lines = [f"{i}\t{z.real:.17g}\t{z.imag:.17g}" for i, z in enumerate(sol.x)]
    _write_text("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_fiedler(args) -> int:
    g = _load_graph(args)
    res = spectral.fiedler(g)
    print(
        f"lambda_star={res.lambda_star:.17g} multiplicity={res.multiplicity} "
        f"residual={res.residual:.6e}",
        file=sys.stderr,
    )
    _write_text(solver.format_scores(res.q), args.out)
    _maybe_figure(args, res.q, "scores")
    return EXIT_OK


def cmd_mov(args) -> int:
    g = _load_graph(args)
    s = _read_vector_file(args.seed_file, g.n, "seed")
    if args.center:
        d = construct.out_degree_weights(g)
        s = s - (s @ d) / d.sum()
    res = spectral.mov(g, spectral.MovSpec(s=s, gamma=args.gamma))
    print(f"rho={res.rho:.17g} gamma={res.gamma:.17g}", file=sys.stderr)
    _write_text(solver.format_scores(res.r), args.out)
    _maybe_figure(args, res.r, "scores")
    return EXIT_OK


def cmd_censored(args) -> int:
    g = _load_graph(args)
    v = _teleport_vector(args, g.n)
    if args.exit == "uniform":
        op = construct.make_operator(construct.random_walk(g), "strong", v)
        chain = AugmentedChain.uniform_exit(op, v, args.alpha)
    else:
        chain = AugmentedChain.degree_exit(g, v)
    x, iterations, residual = stationary_with_stats(chain, tol=args.tol)
    _report(iterations, residual)
    _write_text(solver.format_scores(x), args.out)
    _maybe_figure(args, x, "scores")
    return EXIT_OK


def cmd_colley(args) -> int:
    g = _load_graph(args)
    f = _read_vector_file(args.scores, g.n, "score-difference")
    res = colley(g, f)
    print(f"alpha={res.alpha:.17g} sigma={res.sigma:.17g}", file=sys.stderr)
    _write_text(solver.format_scores(res.ratings), args.out)
    _maybe_figure(args, res.ratings, "scores")
    return EXIT_OK


def cmd_isorank(args) -> int:
    fmt = None if args.format == "auto" else args.format
    ga = core.load_graph(args.graph_a, fmt=fmt)
    gb = core.load_graph(args.graph_b, fmt=fmt)
    if args.sim:
        V = np.zeros((ga.n, gb.n))
        with open(args.sim, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                parts = line.split()
                if len(parts) != 3:
                    raise ParseError(f"{args.sim}:{lineno}: expected 'i j value'")
                V[int(parts[0]), int(parts[1])] = float(parts[2])
    else:
        V = None
    res = isorank(ga, gb, alpha=args.alpha, V=V, tol=args.tol)
    _report(res.iterations, res.residual_1norm)
    lines = [
        f"{i}\t{j}\t{res.x[i, j]:.17g}" for i in range(ga.n) for j in range(gb.n)
    ]
    lines.append("# matching")
    lines.extend(f"{i}\t{j}" for i, j in greedy_match(res.x))
    _write_text("\n".join(lines) + "\n", args.out)
    _maybe_figure(args, res.x, "matrix")
    return EXIT_OK


def cmd_ulam(args) -> int:
    cfg = ChirikovConfig(
        eta=args.eta, k=args.k, T=args.t_steps, N=args.n, s=args.samples, seed=args.seed
    )
    g = build_ulam(cfg)
    n = g.n
    v = np.full(n, 1.0 / n)
    if args.variant == "pagerank":
        base = construct.random_walk(g)
    elif args.variant == "weighted":
        counts = np.diff(g.adjacency.csc.indptr).astype(np.float64)  # unweighted in-degree
        base = construct.weighted_walk(g, counts)
    else:
        base = construct.reverse_walk(g)
    op = construct.make_operator(base, "strong", v)
    sol = solver.solve(solver.PageRankProblem(args.alpha, op, v), tol=args.tol)
    _report(sol.iterations, sol.residual_1norm)
    render_heatmap(sol.x, cfg.N, args.out)
    if args.scores_out:
        _write_text(solver.format_scores(sol.x), args.scores_out)
    if args.figure:
        _save_figure(args.figure, heatmap_pixels(sol.x, cfg.N), "heatmap")
    return EXIT_OK


def cmd_info(args) -> int:
    g = _load_graph(args)
    deg = core.degrees(g)
    lines = [
        f"nodes\t{g.n}",
        f"edges\t{g.adjacency.nnz}",
        f"total_weight\t{deg.out_degrees.sum():.17g}",
        f"dangling\t{int(deg.dangling_mask.sum())}",
        f"symmetric\t{core.is_symmetric(g.adjacency)}",
        f"components\t{core.connected_components(g)}",
    ]
    _write_text("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="prkit", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, teleport=True, construction=True, alpha=True):
        _add_graph_args(p)
        if teleport:
            _add_teleport_args(p)
        if construction:
            p.add_argument("--construction", choices=CONSTRUCTIONS, default="random-walk")
            p.add_argument("--weights", choices=["total", "in", "out"], default="total",
                           help="degree weighting for the weighted construction")
            p.add_argument("--weights-file", help="TSV 'node weight' file for the weighted construction")
        if alpha:
            p.add_argument("--alpha", type=float, default=solver.DEFAULT_ALPHA)
        p.add_argument("--tol", type=float, default=solver.DEFAULT_TOL)
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--figure", help="optional matplotlib figure rendered next to the output")

    p = sub.add_parser("solve", help="PageRank scores")
    common(p)
    p.set_defaults(construction="strong")
    p.add_argument("--boundary-nodes", help="dirichlet: comma-separated fixed nodes")
    p.add_argument("--boundary-values", help="dirichlet: comma-separated boundary values (default 0)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pseudo", help="pseudo-PageRank scores (no renormalization)")
    common(p)
    p.set_defaults(func=cmd_pseudo)

    p = sub.add_parser("totalrank", help="damping-averaged scores")
    common(p, alpha=False)
    p.set_defaults(tol=1e-6)
    p.set_defaults(func=cmd_totalrank)

    p = sub.add_parser("heatkernel", help="heat-kernel diffusion scores")
    common(p, alpha=False)
    p.add_argument("--beta", type=float, required=True)
    p.set_defaults(func=cmd_heatkernel)

    p = sub.add_parser("expected", help="expected scores under random damping")
    common(p, alpha=False)
    p.set_defaults(construction="strong")
    p.add_argument("--dist", required=True, help="damping distribution, e.g. uniform:0.6,0.9")
    p.set_defaults(func=cmd_expected)

    p = sub.add_parser("complex", help="complex damping parameter solve")
    _add_graph_args(p)
    _add_teleport_args(p)
    p.add_argument("--alpha", required=True, help="complex damping, e.g. '0.5+0.3j'")
    p.add_argument("--tol", type=float, default=solver.DEFAULT_TOL)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_complex)

    p = sub.add_parser("fiedler", help="Fiedler value and vector")
    _add_graph_args(p)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_fiedler)

    p = sub.add_parser("mov", help="seeded spectral vector")
    _add_graph_args(p)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--seed-file", required=True, help="TSV 'node value' seed vector")
    p.add_argument("--center", action="store_true",
                   help="remove the seed's degree-weighted mean before solving")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_mov)

    p = sub.add_parser("censored", help="censored stationary distribution")
    _add_graph_args(p)
    _add_teleport_args(p)
    p.add_argument("--exit", choices=["uniform", "degree"], default="uniform")
    p.add_argument("--alpha", type=float, default=solver.DEFAULT_ALPHA)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_censored)

    p = sub.add_parser("colley", help="Colley ratings of a game graph")
    _add_graph_args(p)
    p.add_argument("--scores", required=True, help="TSV 'team net-point-diff' file")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_colley)

    p = sub.add_parser("isorank", help="align two graphs")
    p.add_argument("--graph-a", required=True)
    p.add_argument("--graph-b", required=True)
    p.add_argument("--format", choices=["auto", "edge-list", "matrix-market"], default="auto")
    p.add_argument("--alpha", type=float, default=solver.DEFAULT_ALPHA)
    p.add_argument("--sim", help="TSV 'i j value' prior similarity matrix (must sum to 1)")
    p.add_argument("--tol", type=float, default=solver.DEFAULT_TOL)
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_isorank)

    p = sub.add_parser("ulam", help="Ulam network scores rendered as a PGM heatmap")
    p.add_argument("--n", type=int, default=64, help="cells per axis")
    p.add_argument("--samples", type=int, default=200, help="samples per cell")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--eta", type=float, default=0.99)
    p.add_argument("--k", type=float, default=0.22)
    p.add_argument("--t-steps", type=int, default=10)
    p.add_argument("--alpha", type=float, default=0.9)
    p.add_argument("--tol", type=float, default=solver.DEFAULT_TOL)
    p.add_argument("--variant", choices=["pagerank", "weighted", "reverse"], default="pagerank")
    p.add_argument("--out", required=True, help="PGM image path")
    p.add_argument("--scores-out", help="optional TSV of the raw scores")
    p.add_argument("--figure", help="optional matplotlib PNG of the same heatmap")
    p.set_defaults(func=cmd_ulam)

    p = sub.add_parser("info", help="graph summary")
    _add_graph_args(p)
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_info)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValidationError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        if exc.history:
            tail = ", ".join(f"{r:.3e}" for r in exc.history[-5:])
            print(f"last residuals: {tail}", file=sys.stderr)
        return EXIT_CONVERGENCE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
