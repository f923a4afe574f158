"""Tokenizer tests: merge training, encoding, serialization, oracle equivalence."""

import unicodedata

import pytest

from stylonet import bpe
from stylonet.corpus import LabeledDocument
from stylonet.tensor import Rng


# ---------------------------------------------------------------------------
# Brute-force oracle: re-symbolizes the whole corpus and recounts every pair
# from scratch at every iteration. Shares no code with the trained path.
# ---------------------------------------------------------------------------


def oracle_train(texts, n_merges):
    words = []
    for text in texts:
        for w in unicodedata.normalize("NFC", text).split():
            words.append(list(w))
    rules = []
    for _ in range(n_merges):
        counts = {}
        first = {}
        pos = 0
        for w in words:
            for off in range(len(w) - 1):
                pair = (w[off], w[off + 1])
                counts[pair] = counts.get(pair, 0) + 1
                if pair not in first:
                    first[pair] = (pos, off)
                elif (pos, off) < first[pair]:
                    first[pair] = (pos, off)
            pos += 1
        if not counts:
            break
        best_count = max(counts.values())
        candidates = [p for p, c in counts.items() if c == best_count]
        best = min(candidates, key=lambda p: first[p])
        rules.append(best)
        new_words = []
        for w in words:
            out = []
            i = 0
            while i < len(w):
                if i + 1 < len(w) and (w[i], w[i + 1]) == best:
                    out.append(w[i] + w[i + 1])
                    i += 2
                else:
                    out.append(w[i])
                    i += 1
            new_words.append(out)
        words = new_words
    return rules


def random_corpus(rng: Rng, alphabet_size: int, max_bytes: int = 1000) -> str:
    letters = [chr(97 + i) for i in range(alphabet_size)]
    words = []
    total = 0
    while total < max_bytes:
        n = int(rng.integers(1, 9))
        word = "".join(letters[int(i)] for i in rng.integers(0, alphabet_size, n))
        words.append(word)
        total += n + 1
    return " ".join(words)


def docs_of(*texts):
    return [LabeledDocument(author="x", text=t) for t in texts]


class TestTrainBpe:
    def test_workshop_first_merges(self, workshop_docs):
        m = bpe.train_bpe(workshop_docs, 3)
        assert [(r.left, r.right) for r in m.merges] == [("w", "o"), ("wo", "r"), ("wor", "k")]
        assert [r.result for r in m.merges] == ["wo", "wor", "work"]

    def test_zero_merges_gives_character_model(self):
        m = bpe.train_bpe(docs_of("abc ab"), 0)
        assert m.merges == []
        assert bpe.decode(m, bpe.encode(m, "cab")) == ["c", "a", "b"]

    def test_rank_invariants(self):
        m = bpe.train_bpe(docs_of("aaab aab abab baba"), 10)
        assert [r.rank for r in m.merges] == list(range(len(m.merges)))
        for r in m.merges:
            assert r.result == r.left + r.right

    def test_merge_count_capped_by_mergeable_steps(self):
        m = bpe.train_bpe(docs_of("ab ab"), 50)
        assert len(m.merges) == 1  # only (a, b) is ever mergeable

    def test_vocab_size_identity(self):
        for seed in range(5):
            rng = Rng(seed)
            m = bpe.train_bpe(docs_of(random_corpus(rng, 6, 400)), 15)
            assert m.vocab_size == len(m.base_alphabet) + len(m.merges) + 2

    def test_empty_corpus_rejected(self):
        with pytest.raises(bpe.BpeError):
            bpe.train_bpe([], 5)

    def test_deterministic(self):
        d = docs_of("the cat sat on the mat", "the bat")
        a = bpe.train_bpe(d, 8)
        b = bpe.train_bpe(d, 8)
        assert [(r.left, r.right) for r in a.merges] == [(r.left, r.right) for r in b.merges]
        assert a.vocab == b.vocab

    @pytest.mark.parametrize("seed", range(10))
    def test_oracle_equivalence(self, seed):
        rng = Rng(1000 + seed)
        alphabet = int(rng.integers(4, 13))
        n_merges = int(rng.integers(1, 21))
        text = random_corpus(rng, alphabet)
        trained = bpe.train_bpe(docs_of(text), n_merges)
        expected = oracle_train([text], n_merges)
        assert [(r.left, r.right) for r in trained.merges] == expected


class TestEncode:
    @pytest.fixture()
    def work_model(self):
        # alphabet extended so 'g' is a known character
        return bpe.train_bpe(docs_of("workers work in workshop gig"), 3)

    def test_known_word_single_token(self, work_model):
        ids = bpe.encode(work_model, "work")
        assert len(ids) == 1
        assert bpe.decode(work_model, ids) == ["work"]

    def test_merges_applied_in_rank_order(self, work_model):
        assert bpe.decode(work_model, bpe.encode(work_model, "working")) == ["work", "i", "n", "g"]

    def test_empty_string(self, work_model):
        assert bpe.encode(work_model, "") == []

    def test_whitespace_not_tokenized(self, work_model):
        a = bpe.encode(work_model, "work   work\n\twork")
        b = bpe.encode(work_model, "work work work")
        assert a == b

    def test_unknown_characters_degrade_to_unk(self, work_model):
        ids = bpe.encode(work_model, "työ")
        assert bpe.UNK_ID in ids
        assert all(0 <= i < work_model.vocab_size for i in ids)

    def test_nfc_normalization(self):
        m = bpe.train_bpe(docs_of("été"), 3)  # precomposed e-acute
        composed = bpe.encode(m, "été")
        decomposed = bpe.encode(m, "été")
        assert composed == decomposed

    def test_monotone_granularity(self):
        rng = Rng(5)
        text = random_corpus(rng, 5, 500)
        docs = docs_of(text)
        counts = []
        for n in range(0, 25, 4):
            m = bpe.train_bpe(docs, n)
            counts.append(len(bpe.encode(m, text)))
        assert all(a >= b for a, b in zip(counts, counts[1:]))


class TestDecode:
    def test_round_trip_concatenation(self):
        m = bpe.train_bpe(docs_of("work shop workshop"), 6)
        tokens = bpe.decode(m, bpe.encode(m, "work shop"))
        assert "".join(tokens) == "workshop"

    def test_pad_decodes_to_nothing(self):
        m = bpe.train_bpe(docs_of("ab"), 1)
        assert bpe.decode(m, [bpe.PAD_ID]) == []
        assert bpe.decode(m, [bpe.PAD_ID, m.vocab["ab"], bpe.PAD_ID]) == ["ab"]

    def test_unk_placeholder(self):
        m = bpe.train_bpe(docs_of("ab"), 0)
        out = bpe.decode(m, [m.unk_id])
        assert out == ["⟨unk⟩"]

    def test_out_of_range_rejected(self):
        m = bpe.train_bpe(docs_of("ab"), 0)
        with pytest.raises(bpe.BpeError):
            bpe.decode(m, [m.vocab_size])
        with pytest.raises(bpe.BpeError):
            bpe.decode(m, [-1])


class TestMergesFile:
    def test_round_trip_observationally_identical(self, tmp_path):
        rng = Rng(9)
        m = bpe.train_bpe(docs_of(random_corpus(rng, 8, 600)), 12)
        path = tmp_path / "merges.txt"
        bpe.save_merges(m, path)
        loaded = bpe.load_merges(path)
        probe_rng = Rng(10)
        for _ in range(1000):
            probe = random_corpus(probe_rng, 10, 40)
            assert bpe.encode(loaded, probe) == bpe.encode(m, probe)

    def test_save_is_byte_deterministic(self, tmp_path):
        m = bpe.train_bpe(docs_of("workers work in workshop"), 6)
        p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
        bpe.save_merges(m, p1)
        bpe.save_merges(m, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_header_and_format(self, tmp_path):
        m = bpe.train_bpe(docs_of("aa ab"), 2)
        path = tmp_path / "merges.txt"
        bpe.save_merges(m, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "#bpe-merges v1"
        assert lines[1].startswith("#alphabet ")
        assert all("\t" in line for line in lines[2:])

    def test_duplicate_rule_rejected(self):
        text = "#bpe-merges v1\n#alphabet ab\na\tb\na\tb\n"
        with pytest.raises(bpe.BpeError, match="line 4"):
            bpe.loads_merges(text)

    def test_malformed_line_names_line_number(self):
        text = "#bpe-merges v1\n#alphabet ab\nnot a rule\n"
        with pytest.raises(bpe.BpeError, match="line 3"):
            bpe.loads_merges(text)

    def test_unformable_token_rejected(self):
        text = "#bpe-merges v1\n#alphabet ab\nqq\tb\n"
        with pytest.raises(bpe.BpeError, match="line 3"):
            bpe.loads_merges(text)

    def test_missing_header_rejected(self):
        with pytest.raises(bpe.BpeError, match="line 1"):
            bpe.loads_merges("a\tb\n")

    def test_hand_written_table_fixture(self, tmp_path):
        path = tmp_path / "hand.txt"
        path.write_text(
            "#bpe-merges v1\n"
            "#alphabet ehiknoprsw\n"
            "w\to\nwo\tr\nwor\tk\n",
            encoding="utf-8",
        )
        m = bpe.load_merges(path)
        ids = bpe.encode(m, "work")
        assert len(ids) == 1
        assert bpe.decode(m, ids) == ["work"]
