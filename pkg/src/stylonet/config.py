"""Run configuration: one JSON document driving the CLI, with key overrides.

The model section holds architecture knobs only; vocabulary size and author
count are derived from the tokenizer and dataset at train time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from typing import Any, Optional

from .model import ModelConfig
from .train import TrainConfig


class ConfigError(ValueError):
    """Raised for unreadable config files, unknown keys, or bad values."""


# architecture knobs settable from the config file (data-derived dims excluded)
_MODEL_KEYS = (
    "embed_dim", "hidden_units", "conv_filters", "filter_shape", "pool_shape",
    "max_seq_len", "dropout_embed", "dropout_blstm", "dropout_penult",
    "noise_sigma", "noise_anneal_gamma", "combine",
)
_TRAIN_KEYS = tuple(f.name for f in fields(TrainConfig))
_PATH_KEYS = ("dataset", "merges", "checkpoint", "metrics")


@dataclass
class RunConfig:
    model: dict = field(default_factory=dict)
    train: TrainConfig = field(default_factory=TrainConfig)
    paths: dict = field(default_factory=dict)
    bpe_merges: int = 8000
    plots: bool = True

    def model_config(self, vocab_size: int, n_authors: int) -> ModelConfig:
        return ModelConfig(vocab_size=vocab_size, n_authors=n_authors, **self.model)

    def path(self, key: str) -> Optional[str]:
        return self.paths.get(key)


def _coerce_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw  # bare strings are allowed unquoted


def _apply_set(doc: dict, assignment: str) -> None:
    if "=" not in assignment:
        raise ConfigError(f"--set expects key=value, got {assignment!r}")
    dotted, raw = assignment.split("=", 1)
    keys = dotted.strip().split(".")
    if not all(keys):
        raise ConfigError(f"--set has an empty key segment: {assignment!r}")
    node = doc
    for key in keys[:-1]:
        nxt = node.setdefault(key, {})
        if not isinstance(nxt, dict):
            raise ConfigError(f"--set {dotted!r}: {key!r} is not a section")
        node = nxt
    node[keys[-1]] = _coerce_value(raw)


def _check_keys(section: dict, allowed: tuple, where: str) -> None:
    unknown = sorted(set(section) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown key(s) in {where}: {', '.join(unknown)}")


def build_run_config(config_path: Optional[str] = None, overrides: Optional[list[str]] = None) -> RunConfig:
    """Load the config document (if any) and apply ``--set key=value`` overrides."""
    doc: dict = {}
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {config_path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{config_path}: invalid JSON ({exc.msg})")
        if not isinstance(doc, dict):
            raise ConfigError(f"{config_path}: config must be a JSON object")
    for assignment in overrides or []:
        _apply_set(doc, assignment)

    _check_keys(doc, ("model", "train", "paths", "bpe_merges", "plots"), "config")
    model_section = doc.get("model", {})
    train_section = doc.get("train", {})
    paths_section = doc.get("paths", {})
    for name, section in (("model", model_section), ("train", train_section), ("paths", paths_section)):
        if not isinstance(section, dict):
            raise ConfigError(f"config section {name!r} must be an object")
    _check_keys(model_section, _MODEL_KEYS, "model")
    _check_keys(train_section, _TRAIN_KEYS, "train")
    _check_keys(paths_section, _PATH_KEYS, "paths")

    model_kwargs = dict(model_section)
    for key in ("filter_shape", "pool_shape"):
        if key in model_kwargs:
            value = model_kwargs[key]
            if not (isinstance(value, (list, tuple)) and len(value) == 2):
                raise ConfigError(f"model.{key} must be a pair, got {value!r}")
            model_kwargs[key] = (int(value[0]), int(value[1]))

    try:
        train_config = TrainConfig(**train_section)
        train_config.validate()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid train config: {exc}") from exc

    bpe_merges = doc.get("bpe_merges", 8000)
    if not isinstance(bpe_merges, int) or bpe_merges < 0:
        raise ConfigError(f"bpe_merges must be a non-negative integer, got {bpe_merges!r}")
    plots = doc.get("plots", True)
    if not isinstance(plots, bool):
        raise ConfigError(f"plots must be a boolean, got {plots!r}")

    return RunConfig(
        model=model_kwargs,
        train=train_config,
        paths={k: str(v) for k, v in paths_section.items()},
        bpe_merges=bpe_merges,
        plots=plots,
    )
