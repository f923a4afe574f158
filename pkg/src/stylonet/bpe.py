"""Byte-pair-encoding subword tokenizer: merge training, encoding, decoding.

Merges are learned per word (never across whitespace) by repeatedly fusing
the most frequent adjacent symbol pair; ties break toward the pair seen
earliest in a left-to-right scan of the corpus. Token ids are dense:
0 = padding, 1 = unknown, then the base alphabet in sorted order, then
merge results in rank order.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Sequence

PAD_ID = 0
UNK_ID = 1
PAD_TOKEN = "<pad>"
UNK_TOKEN = "⟨unk⟩"  # rendered as a visible placeholder when decoding

MERGES_HEADER = "#bpe-merges v1"
_ALPHABET_PREFIX = "#alphabet "

# sentinel for characters outside the base alphabet; never merges
_UNK_SENTINEL = object()


class BpeError(ValueError):
    """Raised for invalid tokenizer inputs or malformed merges files."""


@dataclass(frozen=True)
class MergeRule:
    """One pair-fusion rule; ``rank`` is its 0-based position in merge order."""

    left: str
    right: str
    rank: int

    @property
    def result(self) -> str:
        return self.left + self.right


@dataclass
class BpeModel:
    """Ordered merge rules plus the token vocabulary they induce."""

    merges: list[MergeRule]
    vocab: dict[str, int]
    base_alphabet: frozenset[str]
    unk_id: int = UNK_ID
    pad_id: int = PAD_ID
    _id_to_token: list[str] = field(default_factory=list, repr=False)
    _pair_rank: dict[tuple[str, str], int] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._id_to_token:
            inv = [""] * len(self.vocab)
            for token, i in self.vocab.items():
                inv[i] = token
            self._id_to_token = inv
        if not self._pair_rank:
            for rule in self.merges:
                self._pair_rank.setdefault((rule.left, rule.right), rule.rank)

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)


def _build_vocab(base_alphabet: Iterable[str], merges: Sequence[MergeRule]) -> dict[str, int]:
    vocab = {PAD_TOKEN: PAD_ID, UNK_TOKEN: UNK_ID}
    for ch in sorted(base_alphabet):
        vocab.setdefault(ch, len(vocab))
    for rule in merges:
        vocab.setdefault(rule.result, len(vocab))
    return vocab


def _corpus_words(texts: Iterable[str]) -> list[tuple[str, ...]]:
    """Whitespace-split words of the NFC-normalized corpus, as symbol tuples."""
    words: list[tuple[str, ...]] = []
    for text in texts:
        for word in unicodedata.normalize("NFC", text).split():
            words.append(tuple(word))
    return words


def _merge_word(word: tuple, left, right) -> tuple:
    """Replace each left/right adjacency with the fused symbol, left to right."""
    merged = left + right
    out = []
    i = 0
    n = len(word)
    while i < n:
        if i + 1 < n and word[i] == left and word[i + 1] == right:
            out.append(merged)
            i += 2
        else:
            out.append(word[i])
            i += 1
    return tuple(out)


def train_bpe(docs: Sequence, n_merges: int) -> BpeModel:
    """Learn up to ``n_merges`` pair-fusion rules from the documents' text.

    Stops early once no adjacent pair occurs anywhere. Selection is by
    highest corpus count; equal counts go to the pair whose first occurrence
    (word position, then offset within the word) comes earliest.
    """
    if n_merges < 0:
        raise BpeError(f"n_merges must be non-negative, got {n_merges}")
    docs = list(docs)
    if not docs:
        raise BpeError("cannot train a tokenizer on an empty corpus")
    words = _corpus_words(d.text for d in docs)
    base_alphabet = frozenset(ch for w in words for ch in w)

    # aggregate identical words: symbolization evolves in lockstep, so only
    # the count and the earliest corpus position of each unique word matter
    uniq: dict[tuple, list] = {}
    for pos, w in enumerate(words):
        entry = uniq.get(w)
        if entry is None:
            uniq[w] = [1, pos]
        else:
            entry[0] += 1

    merges: list[MergeRule] = []
    for rank in range(n_merges):
        counts: dict[tuple, int] = {}
        first_pos: dict[tuple, tuple[int, int]] = {}
        for w, (cnt, wpos) in uniq.items():
            for off in range(len(w) - 1):
                pair = (w[off], w[off + 1])
                counts[pair] = counts.get(pair, 0) + cnt
                seen = first_pos.get(pair)
                if seen is None or (wpos, off) < seen:
                    first_pos[pair] = (wpos, off)
        if not counts:
            break
        best = min(counts, key=lambda p: (-counts[p], first_pos[p]))
        merges.append(MergeRule(best[0], best[1], rank))

        new_uniq: dict[tuple, list] = {}
        for w, (cnt, wpos) in uniq.items():
            if best[0] in w:
                w = _merge_word(w, best[0], best[1])
            entry = new_uniq.get(w)
            if entry is None:
                new_uniq[w] = [cnt, wpos]
            else:
                entry[0] += cnt
                entry[1] = min(entry[1], wpos)
        uniq = new_uniq

    return BpeModel(merges=merges, vocab=_build_vocab(base_alphabet, merges), base_alphabet=base_alphabet)


def _encode_word(model: BpeModel, word: str) -> list:
    """Tokenize one word: split to characters, then fuse lowest-rank pairs first."""
    syms: list = [ch if ch in model.base_alphabet else _UNK_SENTINEL for ch in word]
    ranks = model._pair_rank
    while len(syms) > 1:
        best_rank = None
        best_pair = None
        for i in range(len(syms) - 1):
            if syms[i] is _UNK_SENTINEL or syms[i + 1] is _UNK_SENTINEL:
                continue
            r = ranks.get((syms[i], syms[i + 1]))
            if r is not None and (best_rank is None or r < best_rank):
                best_rank = r
                best_pair = (syms[i], syms[i + 1])
        if best_pair is None:
            break
        out = []
        i = 0
        while i < len(syms):
            if i + 1 < len(syms) and syms[i] == best_pair[0] and syms[i + 1] == best_pair[1]:
                out.append(best_pair[0] + best_pair[1])
                i += 2
            else:
                out.append(syms[i])
                i += 1
        syms = out
    return syms


def encode(model: BpeModel, text: str) -> list[int]:
    """Token-id sequence for ``text``; whitespace separates words and is dropped.

    Characters outside the base alphabet become the unknown id and never
    participate in merges.
    """
    ids: list[int] = []
    for word in unicodedata.normalize("NFC", text).split():
        for sym in _encode_word(model, word):
            if sym is _UNK_SENTINEL:
                ids.append(model.unk_id)
            else:
                ids.append(model.vocab[sym])
    return ids


def decode(model: BpeModel, ids: Sequence[int]) -> list[str]:
    """Token strings for the ids; padding decodes to nothing, unknown to a placeholder."""
    out: list[str] = []
    n = len(model._id_to_token)
    for i in ids:
        i = int(i)
        if i < 0 or i >= n:
            raise BpeError(f"token id {i} out of range [0, {n})")
        if i == model.pad_id:
            continue
        out.append(UNK_TOKEN if i == model.unk_id else model._id_to_token[i])
    return out


# ---------------------------------------------------------------------------
# Merges file (text format, UTF-8)
# ---------------------------------------------------------------------------


def dumps_merges(model: BpeModel) -> str:
    """Serialize merges + base alphabet; the vocabulary is rebuilt on load."""
    lines = [MERGES_HEADER, _ALPHABET_PREFIX + "".join(sorted(model.base_alphabet))]
    lines.extend(f"{r.left}\t{r.right}" for r in model.merges)
    return "\n".join(lines) + "\n"


def loads_merges(text: str) -> BpeModel:
    lines = text.split("\n")
    if not lines or lines[0] != MERGES_HEADER:
        raise BpeError(f"line 1: expected header {MERGES_HEADER!r}")
    if len(lines) < 2 or not lines[1].startswith(_ALPHABET_PREFIX):
        raise BpeError(f"line 2: expected {_ALPHABET_PREFIX.strip()!r} line")
    base_alphabet = frozenset(lines[1][len(_ALPHABET_PREFIX):])

    merges: list[MergeRule] = []
    seen_pairs: set[tuple[str, str]] = set()
    available = set(base_alphabet)
    for lineno, line in enumerate(lines[2:], start=3):
        if line == "":
            continue  # trailing newline
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0] or not parts[1]:
            raise BpeError(f"line {lineno}: expected 'left<TAB>right', got {line!r}")
        left, right = parts
        if (left, right) in seen_pairs:
            raise BpeError(f"line {lineno}: duplicate merge rule {left!r} + {right!r}")
        if left not in available or right not in available:
            missing = left if left not in available else right
            raise BpeError(f"line {lineno}: token {missing!r} not formed by earlier rules or base characters")
        seen_pairs.add((left, right))
        merges.append(MergeRule(left, right, len(merges)))
        available.add(left + right)

    return BpeModel(merges=merges, vocab=_build_vocab(base_alphabet, merges), base_alphabet=base_alphabet)


def save_merges(model: BpeModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps_merges(model))


def load_merges(path) -> BpeModel:
    with open(path, "r", encoding="utf-8") as fh:
        return loads_merges(fh.read())
