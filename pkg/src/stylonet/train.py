"""Training objective, Adam optimizer, plateau scheduling, and the epoch loop.

A run is a deterministic function of (model config, train config, corpus,
seed): initialization, shuffling, dropout masks and noise all come from one
seeded stream, consumed in a fixed order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import bpe as bpe_mod
from . import model as model_mod
from . import tensor as T
from .corpus import CorpusError, DatasetSplit, LabeledDocument, kfold_partitions
from .model import ModelConfig, ModelParams
from .tensor import Rng, Tensor

METRICS_HEADER = "epoch,train_loss,val_loss,val_acc,lr"


class TrainingError(RuntimeError):
    """Raised when a run cannot continue (non-finite loss or gradients)."""


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 64
    learning_rate: float = 1e-4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    l2_lambda: float = 1e-5
    epochs: int = 20
    plateau_patience: int = 5
    plateau_factor: float = 0.5
    min_lr: float = 0.0
    seed: int = 0
    kfold: int = 5

    def validate(self) -> None:
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if not (0 < self.adam_beta1 < 1 and 0 < self.adam_beta2 < 1):
            raise ValueError(f"adam betas must lie in (0, 1), got {self.adam_beta1}, {self.adam_beta2}")
        if self.adam_eps <= 0:
            raise ValueError(f"adam_eps must be > 0, got {self.adam_eps}")
        if self.l2_lambda < 0:
            raise ValueError(f"l2_lambda must be >= 0, got {self.l2_lambda}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.plateau_patience < 1:
            raise ValueError(f"plateau_patience must be >= 1, got {self.plateau_patience}")
        if not 0 < self.plateau_factor < 1:
            raise ValueError(f"plateau_factor must lie in (0, 1), got {self.plateau_factor}")
        if self.min_lr < 0:
            raise ValueError(f"min_lr must be >= 0, got {self.min_lr}")
        if self.kfold < 2:
            raise ValueError(f"kfold must be >= 2, got {self.kfold}")


@dataclass(frozen=True)
class EpochRow:
    epoch: int
    train_loss: float
    val_loss: float
    val_accuracy: float
    learning_rate: float


@dataclass
class TrainReport:
    epochs: list[EpochRow] = field(default_factory=list)
    test_accuracy: Optional[float] = None
    wall_time_s: float = 0.0


def format_metrics_row(row: EpochRow) -> str:
    cells = (row.train_loss, row.val_loss, row.val_accuracy, row.learning_rate)
    return f"{row.epoch}," + ",".join(repr(float(v)) for v in cells)


class MetricsWriter:
    """Appends one CSV row per epoch, flushing so interrupted runs keep a valid prefix."""

    def __init__(self, path):
        self.path = path
        self._fh = open(path, "w", encoding="utf-8", newline="\n")
        self._fh.write(METRICS_HEADER + "\n")
        self._fh.flush()

    def write_row(self, row: EpochRow) -> None:
        self._fh.write(format_metrics_row(row) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


# ---------------------------------------------------------------------------
# Objective
# ---------------------------------------------------------------------------


def cross_entropy_l2(
    probs: Sequence[Tensor],
    targets: np.ndarray,
    weights: Sequence[Tensor],
    l2_lambda: float,
) -> Tensor:
    """Mean negative log-likelihood plus l2_lambda * sum of squared weights.

    ``probs`` holds one probability row per sample, ``targets`` the matching
    one-hot rows. The log argument is clamped at 1e-12. Biases (and anything
    else not passed in ``weights``) are outside the penalty.
    """
    probs = list(probs)
    targets = np.asarray(targets, dtype=np.float64)
    if not probs:
        raise ValueError("cross_entropy_l2 needs at least one sample")
    if targets.shape != (len(probs), probs[0].data.shape[0]):
        raise ValueError(f"targets shape {targets.shape} does not match {len(probs)} probability rows "
                         f"of length {probs[0].data.shape[0]}")
    row_sums = targets.sum(axis=1)
    if not (np.all(np.isin(targets, (0.0, 1.0))) and np.all(row_sums == 1.0)):
        raise ValueError("targets must be one-hot rows")

    log_sum = None
    for p, t_row in zip(probs, targets):
        picked = T.sum_all(T.mul(p, Tensor(t_row)))
        term = T.safe_log(picked)
        log_sum = term if log_sum is None else T.add(log_sum, term)
    loss = T.scale(log_sum, -1.0 / len(probs))
    if l2_lambda != 0.0:
        penalty = None
        for w in weights:
            sq = T.sum_all(T.mul(w, w))
            penalty = sq if penalty is None else T.add(penalty, sq)
        if penalty is not None:
            loss = T.add(loss, T.scale(penalty, l2_lambda))
    return loss


# ---------------------------------------------------------------------------
# Optimizer and scheduler
# ---------------------------------------------------------------------------


@dataclass
class AdamState:
    """First/second moment accumulators, one pair per parameter tensor."""

    m: list[np.ndarray]
    v: list[np.ndarray]
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def init_adam_state(tensors: Sequence[Tensor], beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    return AdamState(
        m=[np.zeros_like(t.data) for t in tensors],
        v=[np.zeros_like(t.data) for t in tensors],
        beta1=beta1,
        beta2=beta2,
        eps=eps,
    )


def adam_step(
    tensors: Sequence[Tensor],
    grads: Sequence[np.ndarray],
    state: AdamState,
    t: int,
    learning_rate: float,
) -> None:
    """Bias-corrected Adam update, in place on ``tensors`` and ``state``.

    ``t`` is the 1-based step index. Raises :class:`TrainingError` before
    touching anything if any gradient is non-finite.
    """
    if t < 1:
        raise ValueError(f"step index must be >= 1, got {t}")
    grads = list(grads)
    for g in grads:
        if not np.all(np.isfinite(g)):
            raise TrainingError("non-finite gradient; aborting optimizer step")
    bc1 = 1.0 - state.beta1 ** t
    bc2 = 1.0 - state.beta2 ** t
    for i, (p, g) in enumerate(zip(tensors, grads)):
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * (g * g)
        m_hat = state.m[i] / bc1
        v_hat = state.v[i] / bc2
        p.data -= learning_rate * m_hat / (np.sqrt(v_hat) + state.eps)


def reduce_lr_on_plateau(
    history: Sequence[float],
    patience: int,
    factor: float,
    current_lr: float,
    min_lr: float = 0.0,
) -> float:
    """Halve-style decay once validation loss stalls for ``patience`` epochs.

    A loss "improves" when it beats the running best by more than 1e-8; the
    stall counter restarts after each drop, so with a permanent stall the
    rate decays every ``patience`` epochs until it floors at ``min_lr``.
    """
    if patience < 1:
        raise ValueError(f"patience must be >= 1, got {patience}")
    best = float("inf")
    last_improve = 0
    for i, loss in enumerate(history):
        if loss < best - 1e-8:
            best = loss
            last_improve = i
    stall = len(history) - 1 - last_improve
    if stall > 0 and stall % patience == 0:
        return max(current_lr * factor, min_lr)
    return current_lr


# ---------------------------------------------------------------------------
# Training / evaluation
# ---------------------------------------------------------------------------


def author_labels(docs: Sequence[LabeledDocument]) -> list[str]:
    """Sorted distinct author names: the canonical class-index order."""
    return sorted({d.author for d in docs})


def _encode_docs(bpe_model, docs: Sequence[LabeledDocument], label_index: dict[str, int]):
    encoded = []
    for d in docs:
        if d.author not in label_index:
            raise CorpusError(f"unknown author label {d.author!r}")
        encoded.append((bpe_mod.encode(bpe_model, d.text), label_index[d.author]))
    return encoded


def _sample_ce(probs: Tensor, label: int) -> float:
    return -float(np.log(max(probs.data[label], 1e-12)))


def _inference_pass(params, config, encoded, rng: Rng) -> tuple[float, float]:
    """Mean cross-entropy and accuracy over encoded documents, inference mode."""
    total_ce = 0.0
    correct = 0
    with T.no_grad():
        for ids, label in encoded:
            probs = model_mod.forward_full(params, config, ids, False, rng)
            total_ce += _sample_ce(probs, label)
            if model_mod.predict_author_index(probs) == label:
                correct += 1
    n = len(encoded)
    return total_ce / n, correct / n


def train(
    model_config: ModelConfig,
    train_config: TrainConfig,
    bpe_model,
    split: DatasetSplit,
    on_epoch: Optional[Callable[[EpochRow], None]] = None,
) -> tuple[ModelParams, TrainReport]:
    """Mini-batch training with per-epoch validation and plateau scheduling.

    Each optimizer step backpropagates the batch-mean cross-entropy plus the
    L2 penalty (accumulated sample by sample, which is mathematically the
    same batch objective). Returns the trained parameters and the per-epoch
    report; ``on_epoch`` fires after every completed epoch.
    """
    started = time.perf_counter()
    model_config.validate()
    train_config.validate()
    if not split.train:
        raise CorpusError("empty training split")
    if not split.validation:
        raise CorpusError("empty validation split")
    authors = author_labels(split.all_documents())
    if len(authors) != model_config.n_authors:
        raise ValueError(f"model expects {model_config.n_authors} authors, corpus has {len(authors)}")
    if bpe_model.vocab_size != model_config.vocab_size:
        raise ValueError(f"model expects vocab of {model_config.vocab_size}, tokenizer has {bpe_model.vocab_size}")
    label_index = {a: i for i, a in enumerate(authors)}

    train_set = _encode_docs(bpe_model, split.train, label_index)
    val_set = _encode_docs(bpe_model, split.validation, label_index)
    test_set = _encode_docs(bpe_model, split.test, label_index)

    rng = Rng(train_config.seed)
    params = model_mod.init_params(model_config, rng)
    named = list(params.named_tensors())
    tensors = [t for _, t in named]
    weights = [t for _, t in params.weight_tensors()]
    state = init_adam_state(tensors, train_config.adam_beta1, train_config.adam_beta2, train_config.adam_eps)

    report = TrainReport()
    lr = train_config.learning_rate
    step = 0
    eval_rng = Rng(0)  # inference consumes no randomness; placeholder stream

    for epoch in range(train_config.epochs):
        order = rng.permutation(len(train_set))
        epoch_loss = 0.0
        n_batches = 0
        for start in range(0, len(order), train_config.batch_size):
            batch = order[start:start + train_config.batch_size]
            params.zero_grads()
            batch_ce = 0.0
            inv = 1.0 / len(batch)
            for j in batch:
                ids, label = train_set[j]
                probs = model_mod.forward_full(params, model_config, ids, True, rng, epoch)
                one_hot = np.zeros(model_config.n_authors)
                one_hot[label] = 1.0
                picked = T.sum_all(T.mul(probs, Tensor(one_hot)))
                sample_loss = T.scale(T.safe_log(picked), -inv)
                T.backward(sample_loss)
                batch_ce += float(sample_loss.data)
            batch_loss = batch_ce
            if train_config.l2_lambda != 0.0:
                penalty = None
                for w in weights:
                    sq = T.sum_all(T.mul(w, w))
                    penalty = sq if penalty is None else T.add(penalty, sq)
                penalty = T.scale(penalty, train_config.l2_lambda)
                T.backward(penalty)
                batch_loss += float(penalty.data)
            if not np.isfinite(batch_loss):
                raise TrainingError(f"non-finite loss at epoch {epoch + 1}, batch {n_batches + 1}")
            if params.embedding.grad is not None:
                params.embedding.grad[bpe_mod.PAD_ID, :] = 0.0  # pad row stays pinned
            grads = [t.grad if t.grad is not None else np.zeros_like(t.data) for t in tensors]
            step += 1
            try:
                adam_step(tensors, grads, state, step, lr)
            except TrainingError as exc:
                raise TrainingError(f"epoch {epoch + 1}, batch {n_batches + 1}: {exc}") from exc
            epoch_loss += batch_loss
            n_batches += 1

        val_loss, val_acc = _inference_pass(params, model_config, val_set, eval_rng)
        row = EpochRow(
            epoch=epoch + 1,
            train_loss=epoch_loss / n_batches,
            val_loss=val_loss,
            val_accuracy=val_acc,
            learning_rate=lr,
        )
        report.epochs.append(row)
        if on_epoch is not None:
            on_epoch(row)
        lr = reduce_lr_on_plateau(
            [r.val_loss for r in report.epochs],
            train_config.plateau_patience,
            train_config.plateau_factor,
            lr,
            train_config.min_lr,
        )

    if test_set:
        _, test_acc = _inference_pass(params, model_config, test_set, eval_rng)
        report.test_accuracy = test_acc
    report.wall_time_s = time.perf_counter() - started
    return params, report


def evaluate_accuracy(
    params: ModelParams,
    config: ModelConfig,
    bpe_model,
    docs: Sequence[LabeledDocument],
    authors: Sequence[str],
) -> float:
    """Fraction of documents whose argmax prediction matches the label."""
    if not docs:
        raise CorpusError("empty evaluation set")
    label_index = {a: i for i, a in enumerate(authors)}
    unknown = sorted({d.author for d in docs} - set(authors))
    if unknown:
        raise CorpusError(f"unknown author labels: {', '.join(unknown)}")
    encoded = _encode_docs(bpe_model, docs, label_index)
    _, acc = _inference_pass(params, config, encoded, Rng(0))
    return acc


@dataclass(frozen=True)
class AuthorMetrics:
    author: str
    precision: float
    recall: float
    support: int


def per_author_metrics(
    params: ModelParams,
    config: ModelConfig,
    bpe_model,
    docs: Sequence[LabeledDocument],
    authors: Sequence[str],
) -> list[AuthorMetrics]:
    """Precision/recall per author over the documents (undefined ratios are 0)."""
    label_index = {a: i for i, a in enumerate(authors)}
    unknown = sorted({d.author for d in docs} - set(authors))
    if unknown:
        raise CorpusError(f"unknown author labels: {', '.join(unknown)}")
    n = len(authors)
    true_pos = np.zeros(n, dtype=np.int64)
    pred_count = np.zeros(n, dtype=np.int64)
    true_count = np.zeros(n, dtype=np.int64)
    with T.no_grad():
        for d in docs:
            probs = model_mod.forward_full(params, config, bpe_mod.encode(bpe_model, d.text), False, Rng(0))
            pred = model_mod.predict_author_index(probs)
            actual = label_index[d.author]
            pred_count[pred] += 1
            true_count[actual] += 1
            if pred == actual:
                true_pos[actual] += 1
    out = []
    for i, a in enumerate(authors):
        precision = true_pos[i] / pred_count[i] if pred_count[i] else 0.0
        recall = true_pos[i] / true_count[i] if true_count[i] else 0.0
        out.append(AuthorMetrics(author=a, precision=float(precision), recall=float(recall), support=int(true_count[i])))
    return out


@dataclass
class KfoldResult:
    fold_accuracies: list[float]
    reports: list[TrainReport]

    @property
    def mean_accuracy(self) -> float:
        return sum(self.fold_accuracies) / len(self.fold_accuracies)


def run_kfold(
    model_config: ModelConfig,
    train_config: TrainConfig,
    docs: Sequence[LabeledDocument],
    bpe_merges: int = 8000,
) -> KfoldResult:
    """Cross-validation: k independent models, fold i seeded with seed + i.

    Each fold retrains the tokenizer on its own training portion (the holdout
    never leaks into the vocabulary) and uses the holdout both as the
    scheduler's validation set and as the accuracy set.
    """
    folds = kfold_partitions(docs, train_config.kfold, train_config.seed)
    accuracies: list[float] = []
    reports: list[TrainReport] = []
    for i, (fold_train, holdout) in enumerate(folds):
        fold_seed = train_config.seed + i
        fold_bpe = bpe_mod.train_bpe(fold_train, bpe_merges)
        authors = author_labels(list(fold_train) + list(holdout))
        fold_model_config = model_mod.config_with_dims(model_config, fold_bpe.vocab_size, len(authors))
        fold_train_config = replace(train_config, seed=fold_seed)
        fold_split = DatasetSplit(train=tuple(fold_train), validation=tuple(holdout), test=tuple(holdout), seed=fold_seed)
        _, report = train(fold_model_config, fold_train_config, fold_bpe, fold_split)
        accuracies.append(report.test_accuracy if report.test_accuracy is not None else 0.0)
        reports.append(report)
    return KfoldResult(fold_accuracies=accuracies, reports=reports)
