"""Shared fixtures and corpus builders for the test suite."""

from __future__ import annotations

import json

import pytest

from stylonet.corpus import LabeledDocument
from stylonet.tensor import Rng


def make_word(rng: Rng, min_len: int = 4, max_len: int = 8) -> str:
    length = int(rng.integers(min_len, max_len + 1))
    return "".join(chr(97 + int(c)) for c in rng.integers(0, 26, length))


def synthetic_corpus(
    n_authors: int = 5,
    docs_per_author: int = 60,
    vocab_per_author: int = 30,
    shared_frac: float = 0.2,
    doc_len: tuple[int, int] = (30, 60),
    seed: int = 1234,
) -> list[LabeledDocument]:
    """Separable toy corpus: each author draws from a mostly-private vocabulary."""
    rng = Rng(seed)
    n_shared = int(round(vocab_per_author * shared_frac))
    shared = [make_word(rng) for _ in range(n_shared)]
    docs = []
    for a in range(n_authors):
        own = [make_word(rng) for _ in range(vocab_per_author - n_shared)]
        vocab = own + shared
        for _ in range(docs_per_author):
            n_words = int(rng.integers(doc_len[0], doc_len[1] + 1))
            words = [vocab[int(i)] for i in rng.integers(0, len(vocab), n_words)]
            docs.append(LabeledDocument(author=f"author_{a}", text=" ".join(words)))
    return docs


def shuffle_labels(docs: list[LabeledDocument], seed: int = 999) -> list[LabeledDocument]:
    """Same texts, labels permuted across the corpus: the no-signal baseline."""
    rng = Rng(seed)
    perm = rng.permutation(len(docs))
    return [LabeledDocument(author=docs[int(j)].author, text=docs[i].text) for i, j in enumerate(perm)]


def write_jsonl(path, docs) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for d in docs:
            fh.write(json.dumps({"author": d.author, "text": d.text}) + "\n")


@pytest.fixture(scope="session")
def workshop_docs() -> list[LabeledDocument]:
    return [LabeledDocument(author="a", text="workers work in workshop")]


@pytest.fixture(scope="session")
def tiny_corpus() -> list[LabeledDocument]:
    """Two authors with disjoint small vocabularies; enough to learn quickly."""
    return synthetic_corpus(n_authors=2, docs_per_author=12, vocab_per_author=10,
                            shared_frac=0.2, doc_len=(8, 16), seed=77)
