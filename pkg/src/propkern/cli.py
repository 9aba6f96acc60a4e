"""Command line entry point: ``propkern compute|p2k|grid|mask|eval``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .attributes import P2KConfig, p2k
from .graph import degree_labels
from .grid import GridGraph, filter_matrix, grid_kernel, quantize_grayscale
from .kernel import PKConfig, normalize_kernel, propagation_kernel

log = logging.getLogger("propkern")

EXIT_INPUT = 2


def _common(p, with_dataset=True):
    if with_dataset:
        p.add_argument("--dataset", required=True, help="directory in TU text layout")
        p.add_argument("--format", default="tu", choices=["tu"])
        p.add_argument("--scheme", default="diffusion", choices=["diffusion", "labelprop"])
        p.add_argument("--degree-labels", action="store_true", help="label nodes by their degree")
        p.add_argument("--symmetrize", action="store_true", help="add the reverse of every listed edge")
    p.add_argument("--tmax", type=int, default=3)
    p.add_argument("--w", type=float, default=1e-5, help="label bin width")
    p.add_argument("--metric", default="tv", choices=["tv", "h"])
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="Gram matrix output file")
    p.add_argument("--per-tmax", action="store_true",
                   help="also write the cumulative kernel of every t <= tmax to OUT.t<t>")
    p.add_argument("--classes-out", help="write graph class labels, one per line")
    p.add_argument("--plot", help="write a Gram-matrix heatmap (png/pdf/svg)")
    p.add_argument("--plot-iterations", help="write per-iteration similarity curve")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="propkern", description="Propagation kernels for graph databases.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    _common(sub.add_parser("compute", help="propagation kernel of a labeled graph database"))

    p = sub.add_parser("p2k", help="propagation kernel with continuous node attributes")
    _common(p)
    p.add_argument("--w-attr", type=float, default=1.0)
    p.add_argument("--metric-attr", default="l1", choices=["l1", "l2"])
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--joint-attr-hash", action="store_true",
                   help="hash all sample-point densities with one projection instead of one per point")

    p = sub.add_parser("grid", help="propagation kernel between grayscale images")
    p.add_argument("--images", required=True, help="directory of .pgm files (sorted by name)")
    p.add_argument("--filter", default="n1_4", choices=["n1_4", "n1_8", "n2_16"])
    p.add_argument("--padding", default="renorm", choices=["renorm", "circular"])
    p.add_argument("--levels", type=int, default=3)
    _common(p, with_dataset=False)

    p = sub.add_parser("mask", help="remove a random fraction of node labels")
    p.add_argument("--dataset", required=True)
    p.add_argument("--fraction", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory (TU layout)")
    p.add_argument("--name", help="dataset prefix for the output files")

    p = sub.add_parser("eval", help="kernel k-NN cross-validation on a Gram matrix")
    p.add_argument("--kernel", required=True, action="append",
                   help="Gram matrix file; repeat to select among kernels on the training folds")
    p.add_argument("--classes", required=True, help="one class label per line")
    p.add_argument("--folds", type=int, default=10)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--knn", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--plot", help="write a per-run accuracy figure")
    return parser


def _load(args):
    db = io.load_tu_dataset(args.dataset, symmetrize=args.symmetrize)
    if args.degree_labels or db.num_labels == 0:
        if not args.degree_labels:
            log.info("dataset has no node labels; using degree labels")
        db = degree_labels(db)
    log.info("loaded %d graphs, %d nodes, k=%d", len(db), db.total_nodes, db.num_labels)
    return db


def _write_outputs(args, K, classes=None):
    io.write_kernel(K.values, args.out)
    if args.per_tmax:
        if not K.contributions:
            raise ValueError("per-iteration contributions unavailable")
        acc = np.zeros_like(K.values)
        for t, Kt in enumerate(K.contributions):
            acc = acc + Kt
            io.write_kernel(normalize_kernel(acc) if args.normalize else acc, f"{args.out}.t{t}")
    if args.classes_out and classes is not None:
        Path(args.classes_out).write_text("".join(f"{c}\n" for c in classes))
    if args.plot:
        from .plotting import plot_gram
        plot_gram(K.values, args.plot)
    if args.plot_iterations and K.contributions:
        from .plotting import plot_contributions
        plot_contributions(K.contributions, args.plot_iterations)


def _keep(args):
    return bool(args.per_tmax or args.plot_iterations)


def cmd_compute(args):
    db = _load(args)
    config = PKConfig(args.tmax, args.w, args.metric, args.scheme, args.normalize, args.seed)
    K = propagation_kernel(db, config, keep_contributions=_keep(args))
    _write_outputs(args, K, db.graph_classes)


def cmd_p2k(args):
    db = io.load_tu_dataset(args.dataset, symmetrize=args.symmetrize)
    if args.degree_labels:
        db = degree_labels(db)
    config = P2KConfig(args.tmax, args.w, args.metric, args.scheme, args.normalize, args.seed,
                       w_attr=args.w_attr, metric_attr=args.metric_attr, samples=args.samples,
                       per_dimension_hash=not args.joint_attr_hash)
    K = p2k(db, config, keep_contributions=_keep(args))
    _write_outputs(args, K, db.graph_classes)


def cmd_grid(args):
    paths = io.list_images(args.images)
    if not paths:
        raise ValueError(f"no .pgm images in {args.images}")
    grids = [GridGraph(quantize_grayscale(io.load_pgm(p), args.levels), args.levels) for p in paths]
    config = PKConfig(args.tmax, args.w, args.metric, "diffusion", args.normalize, args.seed)
    padding = "renormalized_zero" if args.padding == "renorm" else "circular"
    K = grid_kernel(grids, config, filter_matrix(args.filter), padding, keep_contributions=_keep(args))
    _write_outputs(args, K)


def cmd_mask(args):
    db = io.load_tu_dataset(args.dataset)
    masked = io.mask_labels(db, args.fraction, np.random.default_rng(args.seed))
    name = args.name or Path(args.out).name or "DS"
    io.write_tu_dataset(masked, args.out, name)


def cmd_eval(args):
    from .evaluate import evaluate, evaluate_selected

    classes = io.read_classes(args.classes)
    kernels = [io.read_kernel(path) for path in args.kernel]
    if len(kernels) == 1:
        report = evaluate(kernels[0], classes, args.folds, args.runs, args.knn, args.seed)
    else:
        report = evaluate_selected(kernels, classes, args.folds, args.runs, args.knn, args.seed)
    text = "\n".join(report.lines()) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.plot:
        from .plotting import plot_accuracies
        plot_accuracies(report, args.plot)


COMMANDS = {"compute": cmd_compute, "p2k": cmd_p2k, "grid": cmd_grid, "mask": cmd_mask, "eval": cmd_eval}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        COMMANDS[args.command](args)
    except (ValueError, OSError) as e:
        print(f"propkern: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    return 0


if __name__ == "__main__":
    sys.exit(main())
