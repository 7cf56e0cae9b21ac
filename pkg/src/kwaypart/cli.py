"""Command-line interface: ``kwaypart partition | generate | reproduce``."""

from __future__ import annotations

import argparse
import logging
import sys
import time
import warnings
from pathlib import Path

import numpy as np

from . import reproduce as scenarios
from .cuts import ncut, phi_cut, psi_cut
from .eigen import SpectralGapWarning, compute_lk, top_k_eigenpairs
from .errors import KwayError
from .graph import (connected_components, gen_block_model, gen_mesh, load_edge_list,
                    load_matrix_market, normalize, write_edge_list)
from .indicator import partition_graph
from .kmeans import kmeans_rows
from .report import SCHEMA_VERSION, dumps_report, write_assignment
from .twoway import fiedler_sweep

log = logging.getLogger("kwaypart")

METHODS = ("cpqr", "sso", "qr-sso", "kmeans", "fiedler")


def _load_graph(args):
    path = Path(args.input)
    with path.open() as fh:
        if args.format == "mm":
            g = load_matrix_market(fh)
        else:
            g = load_edge_list(fh, one_based=args.one_based).graph
    n_original = g.n
    if args.largest_component:
        comps = connected_components(g)
        sizes = comps.sizes()
        biggest = int(np.argmax(sizes))
        g = g.subgraph(comps.members(biggest))
    return g, n_original


def cmd_partition(args) -> int:
    timing = {}
    t0 = time.perf_counter()
    g, n_original = _load_graph(args)
    timing["load"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    a = normalize(g, args.regularize)
    with warnings.catch_warnings(record=True):
        warnings.simplefilter("always", SpectralGapWarning)
        basis = top_k_eigenpairs(a, args.k, tol=args.tol_eig, seed=args.seed)
    timing["eigen"] = time.perf_counter() - t0
    if basis.gap_warning:
        log.warning("small spectral gap %.3g between lambda_k and lambda_k+1", basis.gap)

    t0 = time.perf_counter()
    metrics = dict.fromkeys(["residual", "grad_q_norm", "iterations", "converged", "phi_cut",
                             "negatives_count", "s"])
    if args.method in ("cpqr", "sso", "qr-sso"):
        out = partition_graph(a, args.k, args.method, grad_tol=args.tol_grad, max_iters=args.max_iter,
                              basis=basis)
        part = out.partition
        metrics.update(
            residual=out.sso.residual,
            grad_q_norm=out.sso.grad_q_norm,
            iterations=None if args.method == "cpqr" else out.sso.iterations,
            converged=None if args.method == "cpqr" else out.sso.converged,
            phi_cut=phi_cut(a, out.phi),
            negatives_count=out.phi.negatives_count,
            s=out.phi.s,
        )
    elif args.method == "kmeans":
        km = kmeans_rows(basis.X, args.k, seed=args.seed, max_iters=args.max_iter, restarts=args.restarts)
        part = km.labels
    else:
        if args.k != 2:
            raise ValueError("--method fiedler requires --k 2")
        part = fiedler_sweep(g, basis=basis).to_partition()
    timing["partition"] = time.perf_counter() - t0

    metrics["ncut"] = ncut(g, part)
    metrics["psi_cut"] = psi_cut(g, part)
    eigs = list(basis.eigenvalues) + ([basis.lambda_next] if basis.lambda_next is not None else [])
    doc = {
        "schema_version": SCHEMA_VERSION,
        "input": {"path": str(args.input), "format": args.format, "one_based": args.one_based,
                  "n": g.n, "edges": g.num_edges, "largest_component": args.largest_component,
                  "n_original": n_original},
        "params": {"k": args.k, "method": args.method, "regularize": args.regularize, "seed": args.seed,
                   "tol_grad": args.tol_grad, "tol_eig": args.tol_eig, "max_iter": args.max_iter,
                   "restarts": args.restarts},
        "spectrum": {"eigenvalues": eigs, "lambda_next": basis.lambda_next,
                     "L_k": compute_lk(basis.eigenvalues), "gap": basis.gap,
                     "gap_warning": basis.gap_warning,
                     "max_eig_residual": float(basis.residual_norms.max())},
        "metrics": metrics,
        "partition": {"k": part.k, "sizes": part.sizes().tolist()},
        "timing": timing if args.timing else None,
    }
    text = dumps_report(doc)
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    if args.assign:
        with open(args.assign, "w") as fh:
            write_assignment(fh, part, g.node_labels)
    return 0


def cmd_generate(args) -> int:
    if args.kind == "mesh":
        g = gen_mesh(args.side, args.beta)
        truth = None
    else:
        sizes = [int(s) for s in args.sizes.split(",")]
        g, truth = gen_block_model(sizes, args.pin, args.pout, args.wout, seed=args.seed)
    with open(args.output, "w") as fh:
        write_edge_list(g, fh)
    if truth is not None and args.labels:
        with open(args.labels, "w") as fh:
            write_assignment(fh, truth)
    print(f"wrote {args.output}: n={g.n} edges={g.num_edges}")
    return 0


def cmd_reproduce(args) -> int:
    fn = scenarios.CASES[args.case]
    kwargs = {"seed": args.seed}
    if args.case == "cheeger-sweep":
        kwargs["count"] = args.count
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SpectralGapWarning)
        result = fn(**kwargs)
    print(f"== {result.name}")
    print(result.format_table())
    if result.failures:
        print("FAILED cells: " + ", ".join(f"{c.row}[{c.column}]" for c in result.failures))
        return 1
    print("all hard cells within tolerance")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kwaypart", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="partition a graph file")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("edgelist", "mm"), default="edgelist")
    p.add_argument("--one-based", action="store_true", help="edge-list node ids start at 1")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=METHODS, default="qr-sso")
    p.add_argument("--regularize", type=float, default=0.0)
    p.add_argument("--tol-grad", type=float, default=1e-5)
    p.add_argument("--tol-eig", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--restarts", type=int, default=1, help="k-means restarts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report")
    p.add_argument("--assign")
    p.add_argument("--largest-component", action="store_true")
    p.add_argument("--timing", action="store_true", help="record wall times (report no longer byte-stable)")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("generate", help="write a synthetic graph")
    p.add_argument("--kind", choices=("mesh", "blocks"), required=True)
    p.add_argument("--side", type=int, default=32)
    p.add_argument("--beta", type=float, default=0.7)
    p.add_argument("--sizes", default="50,50,50")
    p.add_argument("--pin", type=float, default=0.3)
    p.add_argument("--pout", type=float, default=0.005)
    p.add_argument("--wout", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", required=True)
    p.add_argument("--labels")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("reproduce", help="run a reference scenario and diff against targets")
    p.add_argument("--case", choices=tuple(scenarios.CASES), required=True)
    p.add_argument("--count", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except KwayError as exc:
        print(f"error[{exc.exit_code}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
