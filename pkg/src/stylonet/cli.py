"""Command-line interface: tokenizer training, model training, evaluation,
prediction, and corpus statistics.

Exit codes: 0 success, 1 runtime failure, 2 usage/validation error.
"""

from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

from . import bpe as bpe_mod
from . import checkpoint as ckpt_mod
from . import corpus as corpus_mod
from . import model as model_mod
from . import train as train_mod
from .config import ConfigError, RunConfig, build_run_config
from .corpus import CorpusError
from .model import ModelConfigError, ShapeAuditError
from .tensor import Rng

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    """Invalid invocation, config, or input data; maps to exit code 2."""


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="JSON run-config file")
    sub.add_argument("--seed", type=int, help="override train.seed")
    sub.add_argument("--dataset", help="override paths.dataset")
    sub.add_argument("--merges", help="override paths.merges")
    sub.add_argument("--checkpoint", help="override paths.checkpoint")
    sub.add_argument("--metrics", help="override paths.metrics")
    sub.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="override any config key (dotted path)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stylonet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train-bpe", help="train tokenizer merges on the training split")
    _add_common_flags(p)

    p = sub.add_parser("train", help="train the classifier and write checkpoint + metrics")
    _add_common_flags(p)
    p.add_argument("--no-plots", action="store_true", help="skip convergence figures")

    p = sub.add_parser("evaluate", help="accuracy and per-author precision/recall on a dataset")
    _add_common_flags(p)

    p = sub.add_parser("predict", help="rank authors for a text")
    _add_common_flags(p)
    p.add_argument("text", help="document text to attribute")

    p = sub.add_parser("stats", help="print corpus statistics (n,w,c,t)")
    _add_common_flags(p)

    return parser


def _run_config(args) -> RunConfig:
    try:
        cfg = build_run_config(args.config, args.overrides)
    except ConfigError as exc:
        raise UsageError(str(exc)) from exc
    for key in ("dataset", "merges", "checkpoint", "metrics"):
        value = getattr(args, key, None)
        if value is not None:
            cfg.paths[key] = value
    if getattr(args, "seed", None) is not None:
        from dataclasses import replace

        cfg.train = replace(cfg.train, seed=args.seed)
    return cfg


def _require_path(cfg: RunConfig, key: str, must_exist: bool = False) -> str:
    value = cfg.path(key)
    if not value:
        raise UsageError(f"no {key} path given (set paths.{key} or --{key})")
    if must_exist and not os.path.exists(value):
        raise UsageError(f"{key} path does not exist: {value}")
    return value


def _load_dataset(cfg: RunConfig) -> list[corpus_mod.LabeledDocument]:
    path = _require_path(cfg, "dataset", must_exist=True)
    return corpus_mod.load_jsonl(path)


def cmd_train_bpe(cfg: RunConfig) -> int:
    docs = _load_dataset(cfg)
    merges_path = _require_path(cfg, "merges")
    split = corpus_mod.split_stratified(docs, seed=cfg.train.seed)
    tokenizer = bpe_mod.train_bpe(list(split.train), cfg.bpe_merges)  # training text only
    bpe_mod.save_merges(tokenizer, merges_path)
    print(f"trained {len(tokenizer.merges)} merges on {len(split.train)} documents")
    print(f"vocabulary size: {tokenizer.vocab_size}")
    print(f"merges written to {merges_path}")
    return EXIT_OK


def cmd_train(cfg: RunConfig, plots: bool = True) -> int:
    docs = _load_dataset(cfg)
    merges_path = _require_path(cfg, "merges", must_exist=True)
    checkpoint_path = _require_path(cfg, "checkpoint")
    metrics_path = _require_path(cfg, "metrics")
    tokenizer = bpe_mod.load_merges(merges_path)

    split = corpus_mod.split_stratified(docs, seed=cfg.train.seed)
    authors = train_mod.author_labels(docs)
    model_config = cfg.model_config(tokenizer.vocab_size, len(authors))
    model_config.validate()

    with train_mod.MetricsWriter(metrics_path) as writer:
        params, report = train_mod.train(model_config, cfg.train, tokenizer, split,
                                         on_epoch=writer.write_row)
    ckpt_mod.save_checkpoint(checkpoint_path, model_config, params, tokenizer, authors)
    print(f"checkpoint written to {checkpoint_path}")
    print(f"metrics written to {metrics_path}")
    if plots and cfg.plots:
        from .report import render_convergence_figures

        stem = os.path.splitext(os.path.basename(metrics_path))[0]
        out_dir = os.path.dirname(os.path.abspath(metrics_path))
        for fig_path in render_convergence_figures(report.epochs, out_dir, stem):
            print(f"figure written to {fig_path}")
    if report.test_accuracy is not None:
        print(f"test accuracy: {report.test_accuracy:.4f}")
    return EXIT_OK


def cmd_evaluate(cfg: RunConfig) -> int:
    checkpoint_path = _require_path(cfg, "checkpoint", must_exist=True)
    docs = _load_dataset(cfg)
    model_config, params, tokenizer, authors = ckpt_mod.load_checkpoint(checkpoint_path)
    unknown = sorted({d.author for d in docs} - set(authors))
    if unknown:
        raise UsageError(f"dataset has authors absent from the checkpoint: {', '.join(unknown)}")
    accuracy = train_mod.evaluate_accuracy(params, model_config, tokenizer, docs, authors)
    metrics = train_mod.per_author_metrics(params, model_config, tokenizer, docs, authors)
    print(f"accuracy: {accuracy:.4f}")
    print("author,precision,recall,support")
    for m in metrics:
        print(f"{m.author},{m.precision:.4f},{m.recall:.4f},{m.support}")
    return EXIT_OK


def cmd_predict(cfg: RunConfig, text: str) -> int:
    checkpoint_path = _require_path(cfg, "checkpoint", must_exist=True)
    if not text.strip():
        raise UsageError("empty text")
    model_config, params, tokenizer, authors = ckpt_mod.load_checkpoint(checkpoint_path)
    ids = bpe_mod.encode(tokenizer, text)
    from . import tensor as T

    with T.no_grad():
        probs = model_mod.forward_full(params, model_config, ids, False, Rng(0))
    ranked = sorted(enumerate(probs.data), key=lambda pair: (-pair[1], pair[0]))
    print("author,probability")
    for index, p in ranked:
        print(f"{authors[index]},{float(p)!r}")
    return EXIT_OK


def cmd_stats(cfg: RunConfig) -> int:
    docs = _load_dataset(cfg)
    tokenizer = None
    merges_path = cfg.path("merges")
    if merges_path:
        if not os.path.exists(merges_path):
            raise UsageError(f"merges path does not exist: {merges_path}")
        tokenizer = bpe_mod.load_merges(merges_path)
    stats = corpus_mod.corpus_stats(docs, tokenizer)
    print("n,w,c,t")
    print(f"{stats.n_authors},{stats.mean_tokens_per_doc:.2f},{stats.mean_chars_per_doc:.2f},{stats.n_documents}")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _run_config(args)
        if args.command == "train-bpe":
            return cmd_train_bpe(cfg)
        if args.command == "train":
            return cmd_train(cfg, plots=not args.no_plots)
        if args.command == "evaluate":
            return cmd_evaluate(cfg)
        if args.command == "predict":
            return cmd_predict(cfg, args.text)
        if args.command == "stats":
            return cmd_stats(cfg)
        raise UsageError(f"unknown command {args.command!r}")
    except (UsageError, ConfigError, CorpusError, ModelConfigError, ShapeAuditError,
            ckpt_mod.CheckpointError, bpe_mod.BpeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (train_mod.TrainingError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
