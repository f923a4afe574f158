"""Labeled corpora: loading, statistics, stratified splits, k-fold partitions.

All operations are pure functions of (documents, seed); repeated calls
return identical results, and split/partition outputs preserve the input
corpus order within each part.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .tensor import Rng


class CorpusError(ValueError):
    """Raised for malformed dataset files or unsatisfiable split requests."""


@dataclass(frozen=True)
class LabeledDocument:
    """One author-labeled text; the unit of ingestion, splitting, and prediction."""

    author: str
    text: str


@dataclass(frozen=True)
class CorpusStats:
    n_authors: int
    mean_tokens_per_doc: float
    mean_chars_per_doc: float
    n_documents: int


@dataclass(frozen=True)
class DatasetSplit:
    train: tuple[LabeledDocument, ...]
    validation: tuple[LabeledDocument, ...]
    test: tuple[LabeledDocument, ...]
    seed: int

    def all_documents(self) -> tuple[LabeledDocument, ...]:
        return self.train + self.validation + self.test


def load_jsonl(path) -> list[LabeledDocument]:
    """Read one JSON record per line with string fields "author" and "text".

    Unknown fields are ignored. Raises :class:`CorpusError` naming the line
    number for any malformed record, and for an empty file.
    """
    docs: list[LabeledDocument] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}: line {lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(record, dict):
                raise CorpusError(f"{path}: line {lineno}: record is not an object")
            for key in ("author", "text"):
                if key not in record:
                    raise CorpusError(f"{path}: line {lineno}: missing field {key!r}")
                if not isinstance(record[key], str):
                    raise CorpusError(f"{path}: line {lineno}: field {key!r} is not a string")
            author = record["author"]
            text = record["text"]
            if not author:
                raise CorpusError(f"{path}: line {lineno}: empty author label")
            if not text.strip():
                raise CorpusError(f"{path}: line {lineno}: empty text")
            docs.append(LabeledDocument(author=author, text=text))
    if not docs:
        raise CorpusError(f"{path}: empty corpus")
    return docs


def corpus_stats(docs: Sequence[LabeledDocument], tokenizer=None) -> CorpusStats:
    """Dataset summary: author count, mean tokens/doc, mean chars/doc, doc count.

    Token counts use the given BPE model when provided, else whitespace words.
    """
    if not docs:
        raise CorpusError("empty corpus")
    if tokenizer is not None:
        from . import bpe

        token_counts = [len(bpe.encode(tokenizer, d.text)) for d in docs]
    else:
        token_counts = [len(d.text.split()) for d in docs]
    n = len(docs)
    return CorpusStats(
        n_authors=len({d.author for d in docs}),
        mean_tokens_per_doc=sum(token_counts) / n,
        mean_chars_per_doc=sum(len(d.text) for d in docs) / n,
        n_documents=n,
    )


def _author_buckets(docs: Sequence[LabeledDocument]) -> dict[str, list[int]]:
    buckets: dict[str, list[int]] = {}
    for i, d in enumerate(docs):
        buckets.setdefault(d.author, []).append(i)
    return buckets


def split_stratified(
    docs: Sequence[LabeledDocument],
    ratios: tuple[float, float, float] = (0.60, 0.20, 0.20),
    seed: int = 0,
) -> DatasetSplit:
    """Per-author train/validation/test split with floor-based rounding.

    Each author's documents are shuffled once (seeded) and sliced; leftover
    documents beyond the floored counts go to train, then validation, then
    test. Every author therefore lands in train.
    """
    docs = list(docs)
    if not docs:
        raise CorpusError("empty corpus")
    if len(ratios) != 3 or any(r < 0 for r in ratios):
        raise CorpusError(f"ratios must be three non-negative numbers, got {ratios!r}")
    if abs(sum(ratios) - 1.0) > 1e-9:
        raise CorpusError(f"ratios must sum to 1, got {ratios!r}")

    buckets = _author_buckets(docs)
    for author, idxs in buckets.items():
        if len(idxs) < 3:
            raise CorpusError(f"author {author!r} has {len(idxs)} documents; stratified split needs at least 3")

    rng = Rng(seed)
    assigned: list[set[int]] = [set(), set(), set()]
    for author in sorted(buckets):
        idxs = buckets[author]
        order = [idxs[j] for j in rng.permutation(len(idxs))]
        n = len(order)
        counts = [int(n * r) for r in ratios]
        for part in range(n - sum(counts)):
            counts[part % 3] += 1
        cut1, cut2 = counts[0], counts[0] + counts[1]
        assigned[0].update(order[:cut1])
        assigned[1].update(order[cut1:cut2])
        assigned[2].update(order[cut2:])

    parts = tuple(tuple(docs[i] for i in range(len(docs)) if i in member) for member in assigned)
    return DatasetSplit(train=parts[0], validation=parts[1], test=parts[2], seed=seed)


def kfold_partitions(
    docs: Sequence[LabeledDocument], k: int, seed: int = 0
) -> list[tuple[tuple[LabeledDocument, ...], tuple[LabeledDocument, ...]]]:
    """k (train, holdout) pairs; holdouts are per-author stratified and disjoint."""
    docs = list(docs)
    if not docs:
        raise CorpusError("empty corpus")
    if k < 2:
        raise CorpusError(f"k must be at least 2, got {k}")
    buckets = _author_buckets(docs)
    for author, idxs in buckets.items():
        if len(idxs) < k:
            raise CorpusError(f"author {author!r} has {len(idxs)} documents; cannot form {k} folds")

    rng = Rng(seed)
    holdout_sets: list[set[int]] = [set() for _ in range(k)]
    for author in sorted(buckets):
        idxs = buckets[author]
        order = [idxs[j] for j in rng.permutation(len(idxs))]
        n = len(order)
        q, r = divmod(n, k)
        start = 0
        for fold in range(k):
            size = q + (1 if fold < r else 0)
            holdout_sets[fold].update(order[start:start + size])
            start += size

    pairs = []
    for fold in range(k):
        member = holdout_sets[fold]
        holdout = tuple(docs[i] for i in range(len(docs)) if i in member)
        train = tuple(docs[i] for i in range(len(docs)) if i not in member)
        pairs.append((train, holdout))
    return pairs
