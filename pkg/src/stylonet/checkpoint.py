"""Self-describing text checkpoints: config, author labels, tokenizer, parameters.

A checkpoint is one JSON document (``format: 1``) carrying the full model
configuration, the author label order, the merges-file content verbatim, and
every parameter tensor as shape + row-major values. Loading audits each
tensor's shape against the embedded config and rejects mismatches.
"""

from __future__ import annotations

import json
from dataclasses import asdict
from typing import Sequence

import numpy as np

from . import bpe as bpe_mod
from .model import ModelConfig, ModelParams, LstmDirParams, expected_shapes
from .tensor import Tensor

CHECKPOINT_FORMAT = 1


class CheckpointError(ValueError):
    """Raised for unreadable, mis-versioned, or shape-inconsistent checkpoints."""


def _config_to_dict(config: ModelConfig) -> dict:
    d = asdict(config)
    d["filter_shape"] = list(config.filter_shape)
    d["pool_shape"] = list(config.pool_shape)
    return d


def _config_from_dict(d: dict) -> ModelConfig:
    try:
        return ModelConfig(
            vocab_size=int(d["vocab_size"]),
            n_authors=int(d["n_authors"]),
            embed_dim=int(d["embed_dim"]),
            hidden_units=int(d["hidden_units"]),
            conv_filters=int(d["conv_filters"]),
            filter_shape=(int(d["filter_shape"][0]), int(d["filter_shape"][1])),
            pool_shape=(int(d["pool_shape"][0]), int(d["pool_shape"][1])),
            max_seq_len=int(d["max_seq_len"]),
            dropout_embed=float(d["dropout_embed"]),
            dropout_blstm=float(d["dropout_blstm"]),
            dropout_penult=float(d["dropout_penult"]),
            noise_sigma=float(d["noise_sigma"]),
            noise_anneal_gamma=float(d["noise_anneal_gamma"]),
            combine=str(d["combine"]),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise CheckpointError(f"invalid config section: {exc}") from exc


def save_checkpoint(path, config: ModelConfig, params: ModelParams, bpe_model, authors: Sequence[str]) -> None:
    doc = {
        "format": CHECKPOINT_FORMAT,
        "config": _config_to_dict(config),
        "authors": list(authors),
        "merges": bpe_mod.dumps_merges(bpe_model),
        "params": {
            name: {"shape": list(t.data.shape), "values": t.data.reshape(-1).tolist()}
            for name, t in params.named_tensors()
        },
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_checkpoint(path) -> tuple[ModelConfig, ModelParams, "bpe_mod.BpeModel", list[str]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"{path}: not a valid checkpoint document ({exc.msg})") from exc
    if not isinstance(doc, dict) or doc.get("format") != CHECKPOINT_FORMAT:
        raise CheckpointError(f"{path}: unsupported checkpoint format {doc.get('format')!r}")

    config = _config_from_dict(doc.get("config", {}))
    config.validate()
    authors = doc.get("authors")
    if not isinstance(authors, list) or not all(isinstance(a, str) for a in authors) or not authors:
        raise CheckpointError(f"{path}: missing or invalid author list")
    if len(authors) != config.n_authors:
        raise CheckpointError(f"{path}: {len(authors)} authors listed but config expects {config.n_authors}")

    try:
        tokenizer = bpe_mod.loads_merges(doc["merges"])
    except (KeyError, bpe_mod.BpeError) as exc:
        raise CheckpointError(f"{path}: invalid embedded merges ({exc})") from exc
    if tokenizer.vocab_size != config.vocab_size:
        raise CheckpointError(
            f"{path}: tokenizer vocabulary {tokenizer.vocab_size} does not match config vocab_size {config.vocab_size}")

    raw = doc.get("params")
    if not isinstance(raw, dict):
        raise CheckpointError(f"{path}: missing params section")
    tensors: dict[str, Tensor] = {}
    for name, shape in expected_shapes(config).items():
        if name not in raw:
            raise CheckpointError(f"{path}: missing parameter tensor {name!r}")
        entry = raw[name]
        stored_shape = tuple(entry.get("shape", ()))
        if stored_shape != shape:
            raise CheckpointError(f"{path}: parameter {name!r} has shape {stored_shape}, config requires {shape}")
        values = np.asarray(entry.get("values", []), dtype=np.float64)
        if values.size != int(np.prod(shape)):  # np.prod(()) == 1 covers scalars
            raise CheckpointError(f"{path}: parameter {name!r} has {values.size} values, expected {int(np.prod(shape))}")
        tensors[name] = Tensor(values.reshape(shape), requires_grad=True)
    extra = set(raw) - set(expected_shapes(config))
    if extra:
        raise CheckpointError(f"{path}: unexpected parameter tensors: {sorted(extra)}")

    def direction(prefix: str) -> LstmDirParams:
        return LstmDirParams(**{k: tensors[f"{prefix}.{k}"] for k in (
            "w_xf", "w_hf", "b_f", "w_xi", "w_hi", "b_i", "w_xo", "w_ho", "b_o", "w_xc", "w_hc", "b_c")})

    params = ModelParams(
        embedding=tensors["embedding"],
        forward_lstm=direction("forward_lstm"),
        backward_lstm=direction("backward_lstm"),
        w_combine=tensors["w_combine"],
        b_combine=tensors["b_combine"],
        conv_filters=[tensors[f"conv_filters.{i}"] for i in range(config.conv_filters)],
        conv_biases=[tensors[f"conv_biases.{i}"] for i in range(config.conv_filters)],
        w_classifier=tensors["w_classifier"],
        b_classifier=tensors["b_classifier"],
    )
    return config, params, tokenizer, list(authors)
