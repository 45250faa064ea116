"""Command-line surface: one subcommand per pipeline stage.

Exit codes: 0 success; 1 usage or configuration error (bad flag, unknown
subcommand, out-of-range hyperparameter); 2 data error (missing or
malformed input files). Identical invocations produce byte-identical
outputs; the only randomness is the training seed, fixed by ``--seed``.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .corpus import (
    NUM_CLASSES,
    read_corpus,
    read_labels,
    read_partition,
    split_mask,
)
from .diffusion import DiffusionConfig, diffuse_closed_form, diffuse_iterative
from .embeddings import read_embeddings
from .errors import ConfigError, DataError, RoleGraphError
from .evaluation import evaluate, render_report, report_to_dict
from .gcn import (
    DEFAULT_HIDDEN,
    GcnModel,
    TrainConfig,
    forward,
    load_model,
    save_model,
    train,
    write_loss_history,
)
from .graph import (
    DEFAULT_THRESHOLD,
    DIFFUSION,
    GCN,
    build_graph,
    normalize,
    read_graph,
    render_graph,
)
from .predictions import from_diffusion, from_scores, read_jsonl, render_jsonl
from .windows import StopwordList, windowize_corpus
from .windows import PAD as DEFAULT_PAD
from .windows import SEPARATOR as DEFAULT_SEPARATOR


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits 1 (not 2) on usage errors."""

    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(text: str, output: Optional[str]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text, encoding="utf-8")


def _cmd_build_graph(args: argparse.Namespace) -> int:
    emb = read_embeddings(args.embeddings)
    graph = build_graph(emb, threshold=args.threshold)
    _emit(render_graph(graph), args.output)
    return 0


def _cmd_diffuse(args: argparse.Namespace) -> int:
    cfg = DiffusionConfig(alpha=args.alpha, max_iters=args.max_iters, tol=args.tol)
    graph = read_graph(args.graph)
    labels = read_labels(args.labels, graph.n)
    norm = normalize(graph, DIFFUSION)
    if norm.isolated:
        sys.stderr.write(
            f"note: {len(norm.isolated)} isolated node(s) receive no label mass\n"
        )
    if args.closed_form:
        result = diffuse_closed_form(norm, labels.onehot(), cfg)
    else:
        result = diffuse_iterative(norm, labels.onehot(), cfg)
        if not result.converged:
            sys.stderr.write(
                f"note: stopped at max-iters={cfg.max_iters} before reaching "
                f"tol={cfg.tol}\n"
            )
    preds = from_diffusion(result, labels.masked_indices())
    _emit(render_jsonl(preds), args.output)
    return 0


def _cmd_gcn_train(args: argparse.Namespace) -> int:
    graph = read_graph(args.graph)
    emb = read_embeddings(args.embeddings)
    labels = read_labels(args.labels, graph.n)
    cfg = TrainConfig(learning_rate=args.lr, epochs=args.epochs)
    model = GcnModel.init(d=emb.dims, h=args.hidden, k=NUM_CLASSES, seed=args.seed)
    norm = normalize(graph, GCN)
    trained, history = train(model, norm, emb, labels.onehot(), labels.mask, cfg)
    save_model(trained, args.checkpoint)
    if args.loss_history:
        write_loss_history(history, args.loss_history)
    sys.stderr.write(
        f"trained {cfg.epochs} epochs; final loss {history[-1]!r}; "
        f"checkpoint written to {args.checkpoint}\n"
    )
    return 0


def _cmd_gcn_predict(args: argparse.Namespace) -> int:
    graph = read_graph(args.graph)
    emb = read_embeddings(args.embeddings)
    model = load_model(args.checkpoint)
    if args.labels is not None:
        indices = read_labels(args.labels, graph.n).masked_indices()
    else:
        indices = list(range(graph.n))
    scores = forward(model, normalize(graph, GCN), emb)
    preds = from_scores(scores, indices)
    _emit(render_jsonl(preds), args.output)
    return 0


def _cmd_window(args: argparse.Namespace) -> int:
    records = read_corpus(args.corpus)
    stopwords = StopwordList.from_file(args.stopwords) if args.stopwords else None
    lines = []
    for win in windowize_corpus(
        records,
        stopwords=stopwords,
        pad_token=args.pad_token,
        clean=not args.no_clean,
    ):
        obj = {
            "doc_id": win.doc_id,
            "sent_index": win.sent_index,
            "input": win.render(args.separator),
        }
        lines.append(json.dumps(obj, ensure_ascii=False) + "\n")
    _emit("".join(lines), args.output)
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    preds = read_jsonl(args.predictions)
    records = read_corpus(args.corpus)
    partition = read_partition(args.partition)
    _, masked = split_mask(records, partition)
    gold = {}
    for i in masked:
        if records[i].label is None:
            raise DataError(
                f"no gold label for held-out sentence {i} "
                f"({records[i].doc_id!r} #{records[i].sent_index})"
            )
        gold[i] = records[i].label
    name = args.model_name or Path(args.predictions).stem
    report = evaluate(gold, {p.index: p.label for p in preds}, name)
    sys.stdout.write(render_report(report))
    if args.json:
        Path(args.json).write_text(
            json.dumps(report_to_dict(report), indent=2) + "\n", encoding="utf-8"
        )
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def _build_parser() -> _Parser:
    parser = _Parser(prog="rolegraph", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"rolegraph {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-graph", help="embeddings -> similarity graph (SGRAPH1)")
    p.add_argument("embeddings", help="EMB1 embedding file")
    p.add_argument(
        "--threshold",
        type=float,
        default=DEFAULT_THRESHOLD,
        help="cosine threshold; edges need similarity strictly above it",
    )
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.set_defaults(func=_cmd_build_graph)

    p = sub.add_parser("diffuse", help="graph + labels -> predictions (JSONL)")
    p.add_argument("graph", help="SGRAPH1 graph file")
    p.add_argument("labels", help="JSON object mapping sentence index to label name")
    p.add_argument("--alpha", type=float, default=0.5, help="propagation weight in (0,1)")
    p.add_argument("--tol", type=float, default=1e-8, help="max-abs-change stopping tolerance")
    p.add_argument("--max-iters", type=int, default=1000, help="iteration cap")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument(
        "--closed-form",
        action="store_true",
        help="solve the fixed point directly instead of iterating",
    )
    mode.add_argument(
        "--iterative",
        dest="closed_form",
        action="store_false",
        help="iterate the update rule (default)",
    )
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.set_defaults(func=_cmd_diffuse, closed_form=False)

    p = sub.add_parser("gcn-train", help="graph + embeddings + labels -> checkpoint")
    p.add_argument("graph", help="SGRAPH1 graph file")
    p.add_argument("embeddings", help="EMB1 embedding file")
    p.add_argument("labels", help="JSON object mapping sentence index to label name")
    p.add_argument("checkpoint", help="checkpoint file to write (GCN1)")
    p.add_argument("--hidden", type=int, default=DEFAULT_HIDDEN, help="hidden width")
    p.add_argument("--lr", type=float, default=1e-2, help="learning rate")
    p.add_argument("--epochs", type=int, default=200, help="training epochs")
    p.add_argument("--seed", type=int, default=0, help="weight-init seed")
    p.add_argument("--loss-history", help="also write per-epoch losses as CSV here")
    p.set_defaults(func=_cmd_gcn_train)

    p = sub.add_parser("gcn-predict", help="checkpoint + graph + embeddings -> predictions")
    p.add_argument("graph", help="SGRAPH1 graph file")
    p.add_argument("embeddings", help="EMB1 embedding file")
    p.add_argument("checkpoint", help="GCN1 checkpoint file")
    p.add_argument(
        "labels",
        nargs="?",
        help="labels JSON; when given, predict only its hidden indices",
    )
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.set_defaults(func=_cmd_gcn_predict)

    p = sub.add_parser("window", help="corpus -> context-window JSONL")
    p.add_argument("corpus", help="corpus JSONL file")
    p.add_argument("--pad-token", default=DEFAULT_PAD, help="filler for missing slots")
    p.add_argument("--separator", default=DEFAULT_SEPARATOR, help="slot separator")
    p.add_argument("--stopwords", help="replace the bundled stopword list with this file")
    p.add_argument("--no-clean", action="store_true", help="skip stopword removal")
    p.add_argument("-o", "--output", help="write here instead of stdout")
    p.set_defaults(func=_cmd_window)

    p = sub.add_parser("evaluate", help="predictions + gold corpus -> report")
    p.add_argument("predictions", help="predictions JSONL file")
    p.add_argument("--corpus", required=True, help="corpus JSONL with gold labels")
    p.add_argument("--partition", required=True, help="partition JSON (doc -> train/eval)")
    p.add_argument(
        "--model-name",
        help="row name in the report (default: predictions file stem)",
    )
    p.add_argument("--json", help="also write the report as JSON here")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        sys.stderr.write(f"rolegraph: error: {exc}\n")
        return 1
    except RoleGraphError as exc:
        sys.stderr.write(f"rolegraph: error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"rolegraph: error: {exc}\n")
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
