"""Command-line interface: fit, embed, eval, bench, synth.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Every written artifact embeds the run configuration so a rerun from the same
flags and seed reproduces it byte-for-byte.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import baselines, context, evaluation, jsonl, signature, synth
from .columns import load_corpus, load_ground_truth, pooled_stack
from .errors import DataError, NumericalError
from .gmm import FitConfig, fit, load_model, save_model, select_components_bic

EMBED_MODES = (
    context.MODE_D, context.MODE_D_S, context.MODE_D_S_C_CONCAT,
    context.MODE_D_S_C_AGG, "ple", "paf", "ks", "sqgmm",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _default_seed() -> int:
    return int(os.environ.get("GEM_SEED", "0"))


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}") from exc


def _build_parser() -> _Parser:
    parser = _Parser(prog="gem", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=None,
                       help="RNG seed (default: $GEM_SEED or 0)")
        p.add_argument("--threads", type=int, default=1,
                       help="upper bound on worker threads")
        p.add_argument("--threshold", type=float, default=0.95,
                       help="numeric-column detection threshold")

    p_fit = sub.add_parser("fit", help="fit a GMM to the pooled column values")
    p_fit.add_argument("--input", required=True, help="directory of CSV tables")
    p_fit.add_argument("--components", type=int, default=50)
    p_fit.add_argument("--tol", type=float, default=1e-3)
    p_fit.add_argument("--max-iter", type=int, default=200)
    p_fit.add_argument("--restarts", type=int, default=10)
    p_fit.add_argument("--bic-candidates", type=_int_list, default=None,
                       help="comma-separated K values; pick the BIC minimizer")
    p_fit.add_argument("--out", required=True)
    add_common(p_fit)

    p_embed = sub.add_parser("embed", help="write per-column embeddings as JSONL")
    p_embed.add_argument("--input", required=True)
    p_embed.add_argument("--mode", required=True, choices=EMBED_MODES)
    p_embed.add_argument("--model", help="model JSON (required for D/D+S/D+S+C modes)")
    p_embed.add_argument("--headers", help="header-embedding JSONL for C modes")
    p_embed.add_argument("--fallback-headers", action="store_true",
                         help="use the deterministic offline header encoder")
    p_embed.add_argument("--fallback-dim", type=int, default=384)
    p_embed.add_argument("--n-bins", type=int, default=50)
    p_embed.add_argument("--n-frequencies", type=int, default=50)
    p_embed.add_argument("--n-prototypes", type=int, default=50)
    p_embed.add_argument("--restarts", type=int, default=10,
                         help="EM restarts for the sqgmm baseline")
    p_embed.add_argument("--out", required=True)
    add_common(p_embed)

    p_eval = sub.add_parser("eval", help="precision/recall@k and clustering metrics")
    p_eval.add_argument("--embeddings", required=True)
    p_eval.add_argument("--ground-truth", required=True)
    p_eval.add_argument("--k-offset", type=int, default=-1, choices=(-1, 0),
                        help="-1: k = support - 1 (self excluded); 0: k = support")
    p_eval.add_argument("--kmeans", type=int, default=None,
                        help="also cluster with k-means and report ACC/ARI")
    p_eval.add_argument("--argmax-clusters", action="store_true",
                        help="cluster by argmax responsibility (D / D+S modes)")
    p_eval.add_argument("--neighbors-csv", help="optional per-column neighbor dump")
    p_eval.add_argument("--out", required=True)
    add_common(p_eval)

    p_bench = sub.add_parser("bench", help="macro precision across component counts")
    p_bench.add_argument("--input", required=True)
    p_bench.add_argument("--ground-truth", required=True)
    p_bench.add_argument("--candidates", type=_int_list, required=True)
    p_bench.add_argument("--tol", type=float, default=1e-3)
    p_bench.add_argument("--max-iter", type=int, default=200)
    p_bench.add_argument("--restarts", type=int, default=10)
    p_bench.add_argument("--out", required=True)
    add_common(p_bench)

    p_synth = sub.add_parser("synth", help="generate a labeled synthetic corpus")
    p_synth.add_argument("--spec", help="JSON list of type descriptions "
                                        "(default: built-in 5-type preset)")
    p_synth.add_argument("--out-dir", required=True)
    add_common(p_synth)

    return parser


def _run_config(args: argparse.Namespace) -> dict:
    # Destination paths are not part of the run configuration: the same
    # inputs and seed must produce the same payload wherever it is written.
    skip = {"command", "out", "out_dir"}
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    cfg["command"] = args.command
    return cfg


def _seed(args) -> int:
    return args.seed if args.seed is not None else _default_seed()


# ---------------------------------------------------------------- commands

def cmd_fit(args) -> int:
    corpus = load_corpus(args.input, numeric_threshold=args.threshold)
    stack = pooled_stack(corpus)
    cfg = FitConfig(
        n_components=args.components, tol=args.tol, max_iter=args.max_iter,
        n_restarts=args.restarts, seed=_seed(args),
    )
    if args.bic_candidates:
        best_k, scores = select_components_bic(stack, args.bic_candidates, cfg)
        for k in sorted(scores):
            print(f"BIC k={k}: {scores[k]:.3f}")
        print(f"selected k={best_k}")
        cfg = dataclasses.replace(cfg, n_components=best_k)
    model = fit(stack, cfg)
    for r, trace in enumerate(model.traces):
        print(f"restart {r}: final log-likelihood {trace[-1]:.6f} ({len(trace)} iters)")
    save_model(model, args.out)
    print(f"wrote {args.out} (k={model.k}, log-likelihood {model.log_likelihood:.6f})")
    return 0


def _header_vectors(args, corpus) -> np.ndarray:
    if args.headers:
        embs = context.load_header_embeddings(args.headers, corpus)
        return np.stack([context.normalize_header(e.vector) for e in embs])
    if args.fallback_headers:
        return np.stack([
            context.normalize_header(
                context.fallback_header_embed(c.header, args.fallback_dim, _seed(args))
            )
            for c in corpus.columns
        ])
    raise DataError(
        f"mode {args.mode!r} needs --headers FILE or --fallback-headers"
    )


def cmd_embed(args) -> int:
    corpus = load_corpus(args.input, numeric_threshold=args.threshold)
    ids = corpus.ids()
    headers = [c.header for c in corpus.columns]
    mode = args.mode
    config = _run_config(args)

    if mode in (context.MODE_D, context.MODE_D_S, context.MODE_D_S_C_CONCAT,
                context.MODE_D_S_C_AGG):
        if not args.model:
            raise DataError(f"mode {mode!r} requires --model")
        model = load_model(args.model)
        config["k"] = model.k
        if mode == context.MODE_D:
            sigs = signature.distribution_only_matrix(corpus, model)
            vectors = np.stack([s.normalized for s in sigs])
        else:
            sigs = signature.signature_matrix(corpus, model)
            P = np.stack([s.normalized for s in sigs])
            if mode == context.MODE_D_S:
                vectors = P
            else:
                S = _header_vectors(args, corpus)
                F = np.stack([s.std_features for s in sigs])
                if mode == context.MODE_D_S_C_CONCAT:
                    vectors = np.stack([
                        context.compose_concat(c.id, p, s, f).vector
                        for c, p, s, f in zip(corpus.columns, P, S, F)
                    ])
                else:
                    vectors = np.stack([
                        context.compose_aggregate(c.id, p, s, f).vector
                        for c, p, s, f in zip(corpus.columns, P, S, F)
                    ])
    elif mode == "ple":
        bins = baselines.ple_bins(pooled_stack(corpus), args.n_bins)
        vectors = np.stack([baselines.ple_encode(c, bins) for c in corpus.columns])
    elif mode == "paf":
        stack = pooled_stack(corpus)
        freqs = baselines.paf_frequencies(args.n_frequencies)
        lo, hi = float(stack.min()), float(stack.max())
        vectors = np.stack([baselines.paf_encode(c, freqs, lo, hi) for c in corpus.columns])
    elif mode == "ks":
        vectors = np.stack([baselines.ks_fingerprint(c) for c in corpus.columns])
    elif mode == "sqgmm":
        bcfg = baselines.BaselineConfig(n_prototypes=args.n_prototypes)
        fcfg = FitConfig(n_components=args.n_prototypes, n_restarts=args.restarts,
                         seed=_seed(args))
        vectors = baselines.squashing_gmm_encode(corpus, bcfg, fcfg)
        config["k"] = args.n_prototypes
    else:  # unreachable: argparse restricts choices
        raise UsageError(f"unknown mode {mode!r}")

    jsonl.write_embeddings(args.out, ids, headers, vectors, mode=mode, config=config)
    print(f"wrote {args.out}: {len(ids)} columns, dim {vectors.shape[1]}, mode {mode}")
    return 0


def _report_payload(report: evaluation.EvalReport, config: dict) -> dict:
    return {
        "mode": report.mode,
        "macro_precision": report.macro_precision,
        "macro_recall": report.macro_recall,
        "per_type": report.per_type,
        "skipped_labels": report.skipped_labels,
        "acc": report.acc,
        "ari": report.ari,
        "timestamp": report.timestamp,
        "notes": report.notes,
        "config": config,
    }


def cmd_eval(args) -> int:
    emb = jsonl.read_embeddings(args.embeddings)
    gt = load_ground_truth(args.ground_truth)
    for cid in emb.ids:
        if gt.label_for(cid) is None:
            raise DataError(f"column {cid.key()} has no ground-truth label")
    sim = evaluation.cosine_matrix(emb.ids, emb.vectors)
    report = evaluation.precision_recall_at_k(sim, gt, mode=emb.mode,
                                              k_offset=args.k_offset)

    truth = [gt.label_for(cid) for cid in emb.ids]
    if args.kmeans is not None:
        pred = evaluation.kmeans_clusters(emb.vectors, args.kmeans, seed=_seed(args))
        report.acc = evaluation.clustering_acc(pred, truth)
        report.ari = evaluation.adjusted_rand_index(pred, truth)
        report.notes["clustering"] = f"kmeans k={args.kmeans}"
    elif args.argmax_clusters:
        k = emb.meta.get("config", {}).get("k")
        if emb.mode not in (context.MODE_D, context.MODE_D_S, "sqgmm") or not k:
            raise DataError(
                f"mode {emb.mode!r} has no responsibilities block for argmax clustering"
            )
        pred = evaluation.assign_clusters_argmax(emb.vectors[:, :k])
        report.acc = evaluation.clustering_acc(pred, truth)
        report.ari = evaluation.adjusted_rand_index(pred, truth)
        report.notes["clustering"] = "argmax-component"

    payload = _report_payload(report, _run_config(args))
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    print(f"mode {report.mode or '?'}  macro precision {report.macro_precision:.4f}  "
          f"macro recall {report.macro_recall:.4f}")
    for label, m in report.per_type.items():
        print(f"  {label:<24} precision {m['precision']:.4f}  recall {m['recall']:.4f}"
              f"  support {m['support']}")
    if report.skipped_labels:
        print(f"  skipped (support 1): {', '.join(report.skipped_labels)}")
    if report.acc is not None:
        print(f"  ACC {report.acc:.4f}  ARI {report.ari:.4f}")

    if args.neighbors_csv:
        with open(args.neighbors_csv, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["table", "column", "label", "neighbors"])
            labels = [gt.label_for(cid) for cid in emb.ids]
            for i, cid in enumerate(emb.ids):
                lab = labels[i]
                support = sum(1 for l in labels if l == lab)
                k = support + args.k_offset
                if k < 1:
                    continue
                neigh = evaluation.topk_neighbors(sim, i, k)
                writer.writerow([
                    cid.table, cid.column, lab,
                    ";".join(f"{emb.ids[j].table}.{emb.ids[j].column}" for j in neigh),
                ])
    return 0


def cmd_bench(args) -> int:
    corpus = load_corpus(args.input, numeric_threshold=args.threshold)
    gt = load_ground_truth(args.ground_truth)
    stack = pooled_stack(corpus)
    ids = corpus.ids()
    results: list[tuple[int, float]] = []
    for k in sorted(set(args.candidates)):
        cfg = FitConfig(n_components=k, tol=args.tol, max_iter=args.max_iter,
                        n_restarts=args.restarts, seed=_seed(args))
        model = fit(stack, cfg)
        sigs = signature.signature_matrix(corpus, model)
        sim = evaluation.cosine_matrix(ids, np.stack([s.normalized for s in sigs]))
        report = evaluation.precision_recall_at_k(sim, gt, mode=context.MODE_D_S)
        results.append((k, report.macro_precision))
        print(f"k={k}: macro precision {report.macro_precision:.4f}")
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "macro_precision"])
        writer.writerows([(k, repr(p)) for k, p in results])
    Path(str(args.out) + ".config.json").write_text(
        json.dumps(_run_config(args), indent=2) + "\n", encoding="utf-8")
    spread = max(p for _, p in results) - min(p for _, p in results)
    print(f"spread (max - min): {spread:.4f}")
    return 0


def cmd_synth(args) -> int:
    types = synth.load_synth_spec(args.spec) if args.spec else synth.DEFAULT_TYPES
    out = synth.generate_corpus(types, seed=_seed(args), out_dir=args.out_dir)
    n_cols = sum(t.n_columns for t in types)
    print(f"wrote {len(types)} tables, {n_cols} columns under {out}")
    return 0


_COMMANDS = {
    "fit": cmd_fit,
    "embed": cmd_embed,
    "eval": cmd_eval,
    "bench": cmd_bench,
    "synth": cmd_synth,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _COMMANDS[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"gem: usage error: {exc}", file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"gem: data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"gem: numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
