import json
from pathlib import Path

import pytest

from nordial import Corpus, Label, Tweet, load_corpus, save_corpus
from nordial.cli import run_cli

FIXTURES = Path(__file__).parent / "fixtures"

B, N, D, M = Label.BOKMAL, Label.NYNORSK, Label.DIALECT, Label.MIXED

MARKER_TEXT = {
    B: "jeg har en lang tekst om hverdagen min i byen",
    N: "eg har vore ute og gått ein lang tur i dag",
    D: "æ ska heim no og æ e ganske trøtt etter jobb",
    M: "jeg har lest det men æ ska si min mening om det",
}


def hundred_tweet_corpus(path):
    tweets = tuple(
        Tweet(f"t{i}", MARKER_TEXT[list(Label)[i % 4]] + f" nr {i}", label=list(Label)[i % 4])
        for i in range(100)
    )
    save_corpus(Corpus(tweets), path)
    return path


class TestHelpAndUsage:
    def test_top_level_help_exits_zero(self, capsys):
        assert run_cli(["--help"]) == 0
        assert "harvest" in capsys.readouterr().out

    @pytest.mark.parametrize("command", [
        "harvest", "split", "stats", "chi2", "kappa", "train", "eval", "classify", "serve",
    ])
    def test_subcommand_help_exits_zero(self, command, capsys):
        assert run_cli([command, "--help"]) == 0
        assert command in capsys.readouterr().out

    def test_unknown_flag_is_usage_error(self, capsys):
        assert run_cli(["stats", "--nope"]) == 1
        assert "usage error" in capsys.readouterr().err

    def test_no_command_is_usage_error(self):
        assert run_cli([]) == 1

    def test_missing_file_is_data_error(self, tmp_path, capsys):
        assert run_cli(["stats", "--in", str(tmp_path / "absent.jsonl")]) == 2
        assert "error" in capsys.readouterr().err


class TestSplitCommand:
    def test_hundred_tweets_80_10_10(self, tmp_path):
        src = hundred_tweet_corpus(tmp_path / "in.jsonl")
        out = tmp_path / "out.jsonl"
        assert run_cli(["split", "--in", str(src), "--ratios", "0.8,0.1,0.1",
                        "--seed", "42", "--out", str(out), "--quiet"]) == 0
        corpus = load_corpus(out)
        counts = {}
        for t in corpus:
            counts[t.split.value] = counts.get(t.split.value, 0) + 1
        assert counts == {"train": 80, "dev": 10, "test": 10}

    def test_byte_identical_reruns(self, tmp_path):
        src = hundred_tweet_corpus(tmp_path / "in.jsonl")
        out1, out2 = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        for out in (out1, out2):
            assert run_cli(["split", "--in", str(src), "--seed", "7",
                            "--out", str(out), "--quiet"]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_unlabeled_corpus_is_data_error(self, tmp_path, capsys):
        src = tmp_path / "in.jsonl"
        save_corpus(Corpus((Tweet("a", "uten merkelapp her"),)), src)
        assert run_cli(["split", "--in", str(src), "--out", str(tmp_path / "o.jsonl")]) == 2

    def test_bad_ratios_usage_error(self, tmp_path):
        src = hundred_tweet_corpus(tmp_path / "in.jsonl")
        assert run_cli(["split", "--in", str(src), "--ratios", "0.8,0.2"]) == 1


class TestStatsCommand:
    def test_text_table(self, tmp_path, capsys):
        src = hundred_tweet_corpus(tmp_path / "in.jsonl")
        assert run_cli(["stats", "--in", str(src)]) == 0
        out = capsys.readouterr().out
        assert "bokmal" in out and "total" in out

    def test_json_output(self, tmp_path, capsys):
        src = hundred_tweet_corpus(tmp_path / "in.jsonl")
        assert run_cli(["stats", "--in", str(src), "--json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["n"] == 100
        assert doc["rows"]["unsplit"]["bokmal"] == 25


class TestKappaCommand:
    def test_bundled_fixture_prints_0_6000(self, capsys):
        assert run_cli(["kappa", "--in", str(FIXTURES / "kappa_records.jsonl"), "--quiet"]) == 0
        assert capsys.readouterr().out == "0.6000\n"

    def test_label_log_format(self, tmp_path, capsys):
        log = tmp_path / "labels.jsonl"
        lines = []
        for i, (a, b) in enumerate([("bokmal", "bokmal"), ("bokmal", "bokmal"),
                                    ("nynorsk", "nynorsk"), ("dialect", "nynorsk")]):
            lines.append({"tweet_id": f"t{i}", "label": a, "annotator": "ann1", "timestamp": i})
            lines.append({"tweet_id": f"t{i}", "label": b, "annotator": "ann2", "timestamp": i})
        log.write_text("\n".join(json.dumps(l) for l in lines) + "\n", encoding="utf-8")
        assert run_cli(["kappa", "--in", str(log), "--quiet"]) == 0
        assert capsys.readouterr().out == "0.6000\n"

    def test_unrecognized_format_is_data_error(self, tmp_path):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"who": "knows"}\n', encoding="utf-8")
        assert run_cli(["kappa", "--in", str(bad)]) == 2


class TestHarvestCommand:
    def test_stream_to_candidates(self, tmp_path, capsys):
        stream = tmp_path / "stream.jsonl"
        records = [
            {"id": "keep", "text": "æ ska dra heim no i dag etter jobb du"},
            {"id": "short", "text": "æ ska heim"},
            {"id": "nomatch", "text": "this text has absolutely no markers in it at all"},
        ]
        stream.write_text("\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n",
                          encoding="utf-8")
        out = tmp_path / "candidates.jsonl"
        assert run_cli(["harvest", "--in", str(stream), "--out", str(out), "--quiet"]) == 0
        corpus = load_corpus(out)
        assert [t.id for t in corpus] == ["keep"]
        assert corpus[0].matched_terms == ("æ ska",)

    def test_min_tokens_flag(self, tmp_path):
        stream = tmp_path / "stream.jsonl"
        stream.write_text(json.dumps({"id": "a", "text": "æ ska heim no"}, ensure_ascii=False) + "\n",
                          encoding="utf-8")
        out = tmp_path / "c.jsonl"
        assert run_cli(["harvest", "--in", str(stream), "--out", str(out),
                        "--min-tokens", "3", "--quiet"]) == 0
        assert len(load_corpus(out)) == 1

    def test_bad_stream_is_data_error(self, tmp_path):
        stream = tmp_path / "stream.jsonl"
        stream.write_text('{"id": "a", "text": "x", "extra": 1}\n', encoding="utf-8")
        assert run_cli(["harvest", "--in", str(stream), "--out", str(tmp_path / "o")]) == 2


def planted_corpus_file(path):
    tweets = []
    for i in range(12):
        tweets.append(Tweet(f"d{i}", f"æ felles ord nummer {i} her", label=D))
        tweets.append(Tweet(f"b{i}", f"jeg felles ord nummer {i} her", label=B))
    save_corpus(Corpus(tuple(tweets)), path)
    return path


class TestChi2Command:
    def test_planted_trait_first(self, tmp_path, capsys):
        src = planted_corpus_file(tmp_path / "in.jsonl")
        assert run_cli(["chi2", "--in", str(src), "--pair", "bokmal", "dialect",
                        "--ngram-range", "1,1", "--quiet"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "feature\tchi2\tp_value"
        top_features = {lines[1].split("\t")[0], lines[2].split("\t")[0]}
        assert top_features == {"æ", "jeg"}  # perfectly separated pair, lexicographic tie

    def test_report_format_one_decimal(self, tmp_path, capsys):
        src = planted_corpus_file(tmp_path / "in.jsonl")
        assert run_cli(["chi2", "--in", str(src), "--pair", "bokmal", "dialect",
                        "--format", "report", "--quiet"]) == 0
        out = capsys.readouterr().out
        assert "24.0\n" in out  # 12/12 perfect split gives statistic 24.0

    def test_bad_label_usage_error(self, tmp_path):
        src = planted_corpus_file(tmp_path / "in.jsonl")
        assert run_cli(["chi2", "--in", str(src), "--pair", "bokmal", "svensk"]) == 1


@pytest.fixture(scope="module")
def trained_model(tmp_path_factory):
    """Corpus with splits + trained MNB model file, shared across CLI tests."""
    root = tmp_path_factory.mktemp("cli-train")
    corpus_path = hundred_tweet_corpus(root / "corpus.jsonl")
    split_path = root / "split.jsonl"
    assert run_cli(["split", "--in", str(corpus_path), "--seed", "3",
                    "--out", str(split_path), "--quiet"]) == 0
    model_path = root / "model.json"
    assert run_cli(["train", "--in", str(split_path), "--model", "mnb",
                    "--grid", str(FIXTURES / "grid_small.json"),
                    "--out", str(model_path), "--quiet"]) == 0
    return split_path, model_path


class TestTrainEvalClassify:
    def test_model_file_written_with_metadata(self, trained_model):
        _, model_path = trained_model
        doc = json.loads(model_path.read_text(encoding="utf-8"))
        assert doc["format"] == "nordial-model"
        assert doc["kind"] == "mnb"
        assert "corpus_sha256" in doc["metadata"]
        assert doc["metadata"]["grid_size"] == 4  # 2 char_min_dfs x 2 alphas

    def test_eval_report(self, trained_model, capsys):
        split_path, model_path = trained_model
        assert run_cli(["eval", "--model", str(model_path), "--in", str(split_path),
                        "--split", "test", "--quiet"]) == 0
        out = capsys.readouterr().out
        assert "macro" in out and "BK" in out

    def test_eval_single_label(self, trained_model, capsys):
        split_path, model_path = trained_model
        assert run_cli(["eval", "--model", str(model_path), "--in", str(split_path),
                        "--split", "test", "--label", "dialect", "--quiet"]) == 0
        out = capsys.readouterr().out
        assert out.startswith("dialect\tprecision=")
        assert "recall=" in out and "f1=" in out

    def test_eval_json(self, trained_model, capsys):
        split_path, model_path = trained_model
        assert run_cli(["eval", "--model", str(model_path), "--in", str(split_path),
                        "--split", "dev", "--json", "--quiet"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["schema"] == "nordial-eval-report"

    def test_classify_single_text(self, trained_model, capsys):
        _, model_path = trained_model
        assert run_cli(["classify", "--model", str(model_path),
                        "--text", MARKER_TEXT[D], "--quiet"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["label"] == "dialect"
        assert set(doc["scores"]) == {"bokmal", "nynorsk", "dialect", "mixed"}

    def test_classify_stream(self, trained_model, tmp_path, capsys):
        _, model_path = trained_model
        stream = tmp_path / "texts.jsonl"
        stream.write_text(json.dumps({"id": "x", "text": MARKER_TEXT[B]}, ensure_ascii=False) + "\n",
                          encoding="utf-8")
        assert run_cli(["classify", "--model", str(model_path), "--in", str(stream),
                        "--quiet"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["id"] == "x"
        assert doc["label"] == "bokmal"

    def test_classify_needs_exactly_one_input(self, trained_model):
        _, model_path = trained_model
        assert run_cli(["classify", "--model", str(model_path)]) == 1
        assert run_cli(["classify", "--model", str(model_path),
                        "--text", "x", "--in", "y"]) == 1

    def test_train_requires_splits(self, tmp_path):
        src = hundred_tweet_corpus(tmp_path / "nosplit.jsonl")
        assert run_cli(["train", "--in", str(src), "--model", "mnb",
                        "--out", str(tmp_path / "m.json")]) == 2

    def test_train_threads_same_result(self, tmp_path, trained_model):
        split_path, model_path = trained_model
        threaded = tmp_path / "threaded.json"
        assert run_cli(["train", "--in", str(split_path), "--model", "mnb",
                        "--grid", str(FIXTURES / "grid_small.json"),
                        "--threads", "4", "--out", str(threaded), "--quiet"]) == 0
        a = json.loads(model_path.read_text(encoding="utf-8"))
        b = json.loads(threaded.read_text(encoding="utf-8"))
        assert a["model"] == b["model"]
        assert a["metadata"]["chosen_config"] == b["metadata"]["chosen_config"]


class TestConfigFile:
    def test_config_overrides_defaults(self, tmp_path, capsys):
        src = hundred_tweet_corpus(tmp_path / "in.jsonl")
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"split": {"ratios": "0.6,0.2,0.2"}}), encoding="utf-8")
        out = tmp_path / "out.jsonl"
        assert run_cli(["split", "--in", str(src), "--config", str(config),
                        "--out", str(out), "--quiet"]) == 0
        corpus = load_corpus(out)
        assert sum(1 for t in corpus if t.split is not None and t.split.value == "train") == 60

    def test_explicit_flag_beats_config(self, tmp_path):
        src = hundred_tweet_corpus(tmp_path / "in.jsonl")
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"split": {"ratios": "0.6,0.2,0.2"}}), encoding="utf-8")
        out = tmp_path / "out.jsonl"
        assert run_cli(["split", "--in", str(src), "--config", str(config),
                        "--ratios", "0.8,0.1,0.1", "--out", str(out), "--quiet"]) == 0
        corpus = load_corpus(out)
        assert sum(1 for t in corpus if t.split.value == "train") == 80

    def test_unknown_config_section_usage_error(self, tmp_path):
        src = hundred_tweet_corpus(tmp_path / "in.jsonl")
        config = tmp_path / "config.json"
        config.write_text(json.dumps({"nope": {}}), encoding="utf-8")
        assert run_cli(["split", "--in", str(src), "--config", str(config)]) == 1
