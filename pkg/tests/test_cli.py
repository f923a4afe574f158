"""CLI subcommand tests: file outputs, exit codes, determinism."""

import json

import pytest

from stylonet.cli import main
from stylonet.corpus import LabeledDocument

from conftest import synthetic_corpus, write_jsonl


@pytest.fixture()
def workspace(tmp_path):
    docs = synthetic_corpus(n_authors=2, docs_per_author=10, vocab_per_author=8,
                            shared_frac=0.25, doc_len=(8, 14), seed=42)
    dataset = tmp_path / "data.jsonl"
    write_jsonl(dataset, docs)
    config = {
        "model": {"embed_dim": 8, "hidden_units": 8, "conv_filters": 4,
                  "filter_shape": [3, 3], "pool_shape": [2, 2], "max_seq_len": 14},
        "train": {"epochs": 2, "batch_size": 6, "learning_rate": 0.01, "seed": 9},
        "paths": {
            "dataset": str(dataset),
            "merges": str(tmp_path / "merges.txt"),
            "checkpoint": str(tmp_path / "ckpt.json"),
            "metrics": str(tmp_path / "metrics.csv"),
        },
        "bpe_merges": 60,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    return tmp_path, config_path, config


class TestStats:
    def test_table_shaped_row(self, tmp_path, capsys):
        dataset = tmp_path / "data.jsonl"
        write_jsonl(dataset, [LabeledDocument("x", "ab cd"), LabeledDocument("y", "one two three")])
        assert main(["stats", "--dataset", str(dataset)]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0] == "n,w,c,t"
        n, w, c, t = out[1].split(",")
        assert (n, t) == ("2", "2")
        assert float(w) == 2.5

    def test_missing_dataset_exit_2(self, capsys):
        assert main(["stats", "--dataset", "/no/such/file.jsonl"]) == 2
        assert "/no/such/file.jsonl" in capsys.readouterr().err


class TestTrainBpe:
    def test_workshop_merges_file(self, tmp_path, capsys):
        dataset = tmp_path / "data.jsonl"
        docs = [LabeledDocument("a", "workers work in workshop")] * 3
        write_jsonl(dataset, docs)
        merges = tmp_path / "merges.txt"
        rc = main(["train-bpe", "--dataset", str(dataset), "--merges", str(merges),
                   "--set", "bpe_merges=6"])
        assert rc == 0
        lines = merges.read_text(encoding="utf-8").splitlines()
        assert lines[2:5] == ["w\to", "wo\tr", "wor\tk"]
        assert "vocabulary size" in capsys.readouterr().out

    def test_rerun_byte_identical(self, workspace):
        tmp_path, config_path, config = workspace
        assert main(["train-bpe", "--config", str(config_path)]) == 0
        first = (tmp_path / "merges.txt").read_bytes()
        assert main(["train-bpe", "--config", str(config_path)]) == 0
        assert (tmp_path / "merges.txt").read_bytes() == first

    def test_missing_dataset_exit_2(self, tmp_path, capsys):
        rc = main(["train-bpe", "--dataset", str(tmp_path / "absent.jsonl"),
                   "--merges", str(tmp_path / "m.txt")])
        assert rc == 2
        assert "absent.jsonl" in capsys.readouterr().err

    def test_never_observes_validation_or_test_text(self, tmp_path):
        # instrumented corpus: document i carries a unique marker character,
        # so the learned alphabet reveals exactly which documents were read
        docs = [LabeledDocument(f"a{i % 2}", f"common words here {chr(0x4E00 + i)}")
                for i in range(20)]
        dataset = tmp_path / "data.jsonl"
        write_jsonl(dataset, docs)
        merges = tmp_path / "merges.txt"
        seed = 17
        assert main(["train-bpe", "--dataset", str(dataset), "--merges", str(merges),
                     "--seed", str(seed), "--set", "bpe_merges=30"]) == 0
        from stylonet.bpe import load_merges
        from stylonet.corpus import load_jsonl, split_stratified

        split = split_stratified(load_jsonl(dataset), seed=seed)
        alphabet = load_merges(merges).base_alphabet
        train_markers = {d.text[-1] for d in split.train}
        held_out_markers = {d.text[-1] for d in split.validation + split.test}
        assert train_markers <= alphabet
        assert not held_out_markers & alphabet


class TestTrain:
    def test_end_to_end_outputs(self, workspace, capsys):
        tmp_path, config_path, _ = workspace
        assert main(["train-bpe", "--config", str(config_path)]) == 0
        assert main(["train", "--config", str(config_path)]) == 0
        out = capsys.readouterr().out
        assert "test accuracy:" in out
        metrics = (tmp_path / "metrics.csv").read_text().splitlines()
        assert metrics[0] == "epoch,train_loss,val_loss,val_acc,lr"
        assert len(metrics) == 3  # header + 2 epochs
        assert (tmp_path / "ckpt.json").exists()
        assert (tmp_path / "metrics_loss.png").exists()
        assert (tmp_path / "metrics_accuracy.png").exists()

    def test_seeded_rerun_byte_identical_metrics_and_checkpoint(self, workspace):
        tmp_path, config_path, _ = workspace
        assert main(["train-bpe", "--config", str(config_path)]) == 0
        assert main(["train", "--config", str(config_path), "--no-plots"]) == 0
        metrics1 = (tmp_path / "metrics.csv").read_bytes()
        ckpt1 = (tmp_path / "ckpt.json").read_bytes()
        assert main(["train", "--config", str(config_path), "--no-plots"]) == 0
        assert (tmp_path / "metrics.csv").read_bytes() == metrics1
        assert (tmp_path / "ckpt.json").read_bytes() == ckpt1

    def test_invalid_filter_count_fails_before_training(self, workspace, capsys):
        tmp_path, config_path, _ = workspace
        assert main(["train-bpe", "--config", str(config_path)]) == 0
        rc = main(["train", "--config", str(config_path), "--set", "model.conv_filters=0"])
        assert rc == 2
        assert "conv_filters" in capsys.readouterr().err
        assert not (tmp_path / "ckpt.json").exists()

    def test_missing_merges_exit_2(self, workspace, capsys):
        _, config_path, _ = workspace
        rc = main(["train", "--config", str(config_path)])
        assert rc == 2
        assert "merges" in capsys.readouterr().err


@pytest.fixture()
def trained_workspace(workspace):
    tmp_path, config_path, config = workspace
    assert main(["train-bpe", "--config", str(config_path)]) == 0
    assert main(["train", "--config", str(config_path), "--no-plots"]) == 0
    return tmp_path, config_path, config


class TestEvaluate:
    def test_prints_accuracy_and_table(self, trained_workspace, capsys):
        tmp_path, config_path, _ = trained_workspace
        assert main(["evaluate", "--config", str(config_path)]) == 0
        out = capsys.readouterr().out.splitlines()
        assert out[0].startswith("accuracy: ")
        assert out[1] == "author,precision,recall,support"
        assert len(out) == 4  # two authors

    def test_accuracy_is_a_valid_fraction(self, trained_workspace, capsys):
        _, config_path, _ = trained_workspace
        assert main(["evaluate", "--config", str(config_path)]) == 0
        accuracy = float(capsys.readouterr().out.splitlines()[0].split(": ")[1])
        assert 0.0 <= accuracy <= 1.0

    def test_unknown_author_exit_2(self, trained_workspace, tmp_path, capsys):
        _, config_path, config = trained_workspace
        rogue = tmp_path / "rogue.jsonl"
        write_jsonl(rogue, [LabeledDocument("martian", "zzz yyy xxx")])
        rc = main(["evaluate", "--config", str(config_path), "--dataset", str(rogue)])
        assert rc == 2
        assert "martian" in capsys.readouterr().err

    def test_empty_dataset_exit_2(self, trained_workspace, tmp_path):
        _, config_path, _ = trained_workspace
        empty = tmp_path / "empty.jsonl"
        empty.write_text("")
        assert main(["evaluate", "--config", str(config_path), "--dataset", str(empty)]) == 2


class TestPredict:
    def test_probabilities_sum_to_one_descending(self, trained_workspace, capsys):
        _, config_path, _ = trained_workspace
        assert main(["predict", "--config", str(config_path), "some sample text"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "author,probability"
        probs = [float(line.split(",")[1]) for line in lines[1:]]
        assert abs(sum(probs) - 1.0) <= 1e-9  # full-precision printing
        assert probs == sorted(probs, reverse=True)

    def test_same_text_identical_ranking(self, trained_workspace, capsys):
        _, config_path, _ = trained_workspace
        assert main(["predict", "--config", str(config_path), "alpha beta gamma"]) == 0
        first = capsys.readouterr().out
        assert main(["predict", "--config", str(config_path), "alpha beta gamma"]) == 0
        assert capsys.readouterr().out == first

    def test_unseen_characters_no_crash(self, trained_workspace, capsys):
        _, config_path, _ = trained_workspace
        assert main(["predict", "--config", str(config_path), "日本語 テキスト"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert len(lines) == 3

    def test_empty_text_exit_2(self, trained_workspace):
        _, config_path, _ = trained_workspace
        assert main(["predict", "--config", str(config_path), "   "]) == 2


class TestConfigHandling:
    def test_unknown_key_rejected(self, workspace, capsys):
        _, config_path, _ = workspace
        rc = main(["stats", "--config", str(config_path), "--set", "model.window=3"])
        assert rc == 2
        assert "window" in capsys.readouterr().err

    def test_set_overrides_nested_keys(self, workspace, capsys):
        tmp_path, config_path, _ = workspace
        rc = main(["train-bpe", "--config", str(config_path), "--set", "bpe_merges=5"])
        assert rc == 0
        assert "trained 5 merges" in capsys.readouterr().out

    def test_seed_flag_changes_split(self, workspace):
        tmp_path, config_path, _ = workspace
        assert main(["train-bpe", "--config", str(config_path), "--seed", "1"]) == 0
        first = (tmp_path / "merges.txt").read_bytes()
        assert main(["train-bpe", "--config", str(config_path), "--seed", "2"]) == 0
        assert (tmp_path / "merges.txt").read_bytes() != first
