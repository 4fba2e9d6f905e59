"""Command-line pipeline: generate, embed, detect, cluster.

Every command is deterministic given its full flag set including --seed.
Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import analysis, io, plots
from .gde import BatchSpec, gde_run, initial_embedding
from .gdse import gdse_run
from .loss import LossParams, hard_loss, smooth_loss
from .rgh import RghConfig, sample_rgh
from .spectral import spectral_embed


def _out_dir(args) -> Path:
    out = Path(args.output)
    if not out.exists():
        print(f"error: output directory {out} does not exist", file=sys.stderr)
        sys.exit(2)
    return out


def _load_hypergraph(args):
    text = Path(args.input).read_text()
    return io.parse_hyperedge_list(text, one_based=args.one_based)


def _write_metrics(out: Path, trace, Y, r, tau, B0, extra=None):
    summary = {
        "loss_hard": hard_loss(Y, r, B0),
        "loss_smooth": smooth_loss(Y, LossParams(r=r, tau=tau), B0),
        "r": r,
        "tau": tau,
    }
    if extra:
        summary.update(extra)
    (out / "metrics.json").write_text(io.write_metrics(trace, summary))
    (out / "trace.csv").write_text(io.write_trace_csv(trace))


def cmd_generate(args) -> int:
    out = _out_dir(args)
    cfg = RghConfig(n=args.n, s=args.s, D=args.dim, r=args.radius, seed=args.seed)
    gt = sample_rgh(cfg)
    (out / "hyperedges.txt").write_text(io.write_hyperedge_list(gt.hypergraph))
    (out / "ground_truth.csv").write_text(io.write_embedding(gt.points))
    return 0


def cmd_embed(args) -> int:
    out = _out_dir(args)
    H = _load_hypergraph(args)
    B0 = H.incidence()

    from .trace import RunTrace

    if args.algorithm == "spectral":
        Y = spectral_embed(B0, args.dim)
        trace, r, tau = RunTrace(), args.r0, args.tau0
    elif args.algorithm == "gdse":
        res = gdse_run(
            B0,
            args.dim,
            r0=args.r0,
            tau0=args.tau0,
            rates=tuple(args.rates),
            max_iter=args.max_iter,
            seed=args.seed,
        )
        Y, r, tau, trace = res.embedding, res.r, res.tau, res.trace
    else:
        batch = None
        if args.mode == "stochastic":
            batch = BatchSpec(
                node_batch=args.node_batch, edge_batch=args.edge_batch, seed=args.seed
            )
        res = gde_run(
            B0,
            args.dim,
            r0=args.r0,
            tau0=args.tau0,
            init=args.init,
            mode=args.mode,
            batch=batch,
            max_iter=args.max_iter,
            seed=args.seed,
        )
        Y, r, tau, trace = res.embedding, res.r, res.tau, res.trace

    (out / "embedding.csv").write_text(io.write_embedding(Y))
    _write_metrics(out, trace, Y, r, tau, B0)
    if args.plot:
        plots.plot_trace(trace, out / "trace.png")
    return 0


def cmd_detect(args) -> int:
    out = _out_dir(args)
    H = _load_hypergraph(args)
    inject = analysis.inject_spurious if args.direction == "spurious" else analysis.inject_missing
    perturbed = inject(H, args.count, seed=args.seed)
    B = perturbed.hypergraph.incidence()

    res = gde_run(
        B,
        args.dim,
        r0=args.r0,
        tau0=args.tau0,
        init=args.init,
        max_iter=args.max_iter,
        seed=args.seed,
    )
    p = LossParams(r=res.r, tau=res.tau)
    scored = analysis.score_relations(perturbed, res.embedding, p, args.direction)
    curve, auc = analysis.roc_auc(scored)

    roc_lines = ["fpr,tpr"] + [f"{f:.17g},{t:.17g}" for f, t in curve]
    (out / "roc.csv").write_text("\n".join(roc_lines) + "\n")
    extra = {"auc": auc, "direction": args.direction}
    if args.alpha is not None:
        suspicious = [
            (score < args.alpha) if args.direction == "spurious" else (score > args.alpha)
            for _, score, _ in scored.pairs
        ]
        hits = sum(s and flag for s, (_, _, flag) in zip(suspicious, scored.pairs))
        extra["alpha"] = args.alpha
        extra["flagged"] = int(sum(suspicious))
        extra["flagged_true"] = int(hits)
    _write_metrics(out, res.trace, res.embedding, res.r, res.tau, B, extra=extra)
    if args.plot:
        plots.plot_roc(curve, auc, out / "roc.png")
    return 0


def cmd_cluster(args) -> int:
    out = _out_dir(args)
    H = _load_hypergraph(args)
    labels = np.array(
        [int(line) for line in Path(args.labels).read_text().split()], dtype=int
    )
    if labels.size != H.n:
        print(
            f"error: {labels.size} labels for {H.n} nodes", file=sys.stderr
        )
        sys.exit(2)
    if args.k > H.n:
        print(f"error: k={args.k} exceeds node count {H.n}", file=sys.stderr)
        sys.exit(2)

    ct = analysis.cluster_trace(
        H.incidence(),
        args.dim,
        args.k,
        labels,
        kmeans_runs=args.kmeans_runs,
        seed=args.seed,
        r0=args.r0,
        tau0=args.tau0,
        init=args.init,
        max_iter=args.max_iter,
    )
    ari_lines = ["iteration,best_ari"] + [f"{it},{ari:.17g}" for it, ari in ct.entries]
    (out / "ari.csv").write_text("\n".join(ari_lines) + "\n")
    res = ct.result
    final_ari = ct.entries[-1][1] if ct.entries else None
    _write_metrics(
        out,
        res.trace,
        res.embedding,
        res.r,
        res.tau,
        H.incidence(),
        extra={"ari": final_ari, "k": args.k},
    )
    if args.plot:
        plots.plot_ari(ct.entries, out / "ari.png")
    return 0


def _add_common(sub):
    sub.add_argument("-D", "--dim", type=int, default=2, help="embedding dimension")
    sub.add_argument("--r0", "--r", dest="r0", type=float, default=0.1, help="initial radius")
    sub.add_argument("--tau0", type=float, default=5.0, help="initial sharpness")
    sub.add_argument("--seed", type=int, default=0, help="PRNG seed")
    sub.add_argument("-o", "--output", default=".", help="output directory (must exist)")


def _add_io(sub):
    sub.add_argument("input", help="hyperedge list file")
    sub.add_argument(
        "--one-based", action="store_true", help="node ids in the input start at 1"
    )
    sub.add_argument(
        "--no-plot", dest="plot", action="store_false", help="skip figure rendering"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hyperembed",
        description="Geometric hypergraph embedding, reconstruction and analysis",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("generate", help="sample a random geometric hypergraph")
    gen.add_argument("-n", type=int, required=True, help="node count")
    gen.add_argument("-s", type=int, required=True, help="hyperedge count")
    gen.add_argument("-r", "--radius", dest="radius", type=float, required=True)
    _add_common(gen)
    gen.set_defaults(func=cmd_generate)

    emb = subs.add_parser("embed", help="embed a hypergraph and write metrics")
    _add_io(emb)
    emb.add_argument(
        "--algorithm", choices=["spectral", "gdse", "gde"], default="gde"
    )
    emb.add_argument("--mode", choices=["exact", "stochastic"], default="exact")
    emb.add_argument("--init", choices=["auto", "spectral", "centroid"], default="auto")
    emb.add_argument("--max-iter", type=int, default=200)
    emb.add_argument("--node-batch", type=int, default=256)
    emb.add_argument("--edge-batch", type=int, default=256)
    emb.add_argument(
        "--rates",
        nargs=3,
        type=float,
        default=[1.0, 1e-3, 1.0],
        metavar=("GAMMA_B", "GAMMA_R", "GAMMA_TAU"),
        help="GDSE learning rates",
    )
    _add_common(emb)
    emb.set_defaults(func=cmd_embed)

    det = subs.add_parser("detect", help="inject and detect spurious/missing relations")
    _add_io(det)
    det.add_argument("--direction", choices=["spurious", "missing"], required=True)
    det.add_argument("--count", type=int, default=50, help="number of injected errors")
    det.add_argument("--max-iter", type=int, default=50)
    det.add_argument("--init", choices=["auto", "spectral", "centroid"], default="auto")
    det.add_argument(
        "--alpha", type=float, default=None, help="also report flag counts at this threshold"
    )
    _add_common(det)
    det.set_defaults(func=cmd_detect)

    clu = subs.add_parser("cluster", help="K-means ARI trace over GDE iterations")
    _add_io(clu)
    clu.add_argument("--labels", required=True, help="ground-truth labels, one per node")
    clu.add_argument("-k", type=int, required=True, help="cluster count")
    clu.add_argument("--max-iter", type=int, default=50)
    clu.add_argument("--kmeans-runs", type=int, default=50)
    clu.add_argument("--init", choices=["auto", "spectral", "centroid"], default="auto")
    _add_common(clu)
    clu.set_defaults(func=cmd_cluster)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SystemExit:
        raise
    except Exception as exc:  # noqa: BLE001 - map failures to exit code 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
