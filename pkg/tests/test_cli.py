"""Tests for the command-line front end: behaviors and exit codes."""

import csv
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from posbias.cli import main
from posbias.corpus import CorpusRecord, load_corpus, save_corpus

SPEC_TEXT = """\
num_articles = 40
sentences_per_article = 20
k = 10
gold_target = 0,0,0,0,0,0,0,0,0,1
model_target:lead = 1,0,0,0,0,0,0,0,0,0
model_target:mid = 0,0,0,0,1,0,0,0,0,0
model_target:tail = 0,0,0,0,0,0,0,0,0,1
summary_sentences_per_article = 3
allocation = deterministic_largest_remainder
seed = 11
"""


@pytest.fixture
def synth_corpus(tmp_path):
    spec = tmp_path / "spec.txt"
    spec.write_text(SPEC_TEXT, encoding="utf-8")
    corpus = tmp_path / "corpus.jsonl"
    assert main(["synth", "--spec", str(spec), "--out", str(corpus)]) == 0
    return corpus


def test_synth_writes_corpus_and_sidecar(synth_corpus):
    sidecar = synth_corpus.with_suffix(".targets.json")
    assert synth_corpus.exists() and sidecar.exists()
    targets = json.loads(sidecar.read_text(encoding="utf-8"))
    assert targets["k"] == 10
    assert targets["gold_target"][-1] == 1.0
    assert set(targets["model_targets"]) == {"lead", "mid", "tail"}
    records = load_corpus(synth_corpus, "jsonl")
    assert len(records) == 40


def test_synth_determinism(tmp_path):
    spec = tmp_path / "spec.txt"
    spec.write_text(SPEC_TEXT, encoding="utf-8")
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    assert main(["synth", "--spec", str(spec), "--out", str(a)]) == 0
    assert main(["synth", "--spec", str(spec), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_synth_bad_target_exit_2(tmp_path, capsys):
    spec = tmp_path / "spec.txt"
    spec.write_text(
        "num_articles = 4\nsentences_per_article = 10\nk = 2\n"
        "gold_target = 0.4,0.5\nsummary_sentences_per_article = 1\n",
        encoding="utf-8",
    )
    code = main(["synth", "--spec", str(spec), "--out", str(tmp_path / "c.jsonl")])
    assert code == 2
    err = capsys.readouterr().err
    assert "gold_target" in err
    assert "config error" in err


def test_analyze_end_to_end(synth_corpus, tmp_path, capsys):
    out = tmp_path / "out"
    code = main(["analyze", "--input", str(synth_corpus), "--out-dir", str(out)])
    assert code == 0
    rows = {
        row[0]: row
        for row in list(csv.reader((out / "metrics.csv").open(newline="")))[1:]
    }
    assert rows["lead"][1] == "0.900000"
    assert rows["tail"][1] == "0.000000"
    assert rows["lead"][5] == "1.000000"  # lead-bias fraction at k'=3
    doc = json.loads((out / "analysis.json").read_text(encoding="utf-8"))
    assert doc["gold_distribution"]["lead_bias_fraction"] == 0.0
    assert len(doc["correlations"]) == 3
    assert (out / "distributions.svg").exists()
    assert (out / "bias_bars.svg").exists()


def test_analyze_models_filter(synth_corpus, tmp_path):
    out = tmp_path / "out"
    code = main(
        [
            "analyze",
            "--input",
            str(synth_corpus),
            "--models",
            "lead,tail",
            "--out-dir",
            str(out),
        ]
    )
    assert code == 0
    rows = list(csv.reader((out / "metrics.csv").open(newline="")))
    assert [row[0] for row in rows[1:]] == ["lead", "tail"]
    doc = json.loads((out / "analysis.json").read_text(encoding="utf-8"))
    assert doc["correlations"] == []  # below the 3-model threshold


def test_analyze_unknown_model_exit_1(synth_corpus, tmp_path, capsys):
    code = main(
        [
            "analyze",
            "--input",
            str(synth_corpus),
            "--models",
            "absent",
            "--out-dir",
            str(tmp_path / "out"),
        ]
    )
    assert code == 1
    assert "absent" in capsys.readouterr().err


def test_analyze_gold_only_mode(tmp_path):
    records = [
        CorpusRecord(
            id=f"g{i}",
            article=" ".join(f"Alpha{i}x{j} beta{i}x{j}." for j in range(4)),
            gold_summary=f"Alpha{i}x1 beta{i}x1.",
        )
        for i in range(3)
    ]
    corpus = tmp_path / "gold.jsonl"
    save_corpus(records, corpus, "jsonl")
    out = tmp_path / "out"
    code = main(["analyze", "--input", str(corpus), "--k", "2", "--out-dir", str(out)])
    assert code == 0
    metric_rows = list(csv.reader((out / "metrics.csv").open(newline="")))
    assert len(metric_rows) == 1  # header only
    dist_rows = list(csv.reader((out / "distributions.csv").open(newline="")))
    assert len(dist_rows) == 2  # header + gold
    assert not (out / "bias_bars.svg").exists()


def test_analyze_all_articles_short_exit_1(tmp_path, capsys):
    records = [
        CorpusRecord(id="a", article="One. Two.", gold_summary="One."),
        CorpusRecord(id="b", article="Uno. Dos.", gold_summary="Uno."),
    ]
    corpus = tmp_path / "short.jsonl"
    save_corpus(records, corpus, "jsonl")
    code = main(
        ["analyze", "--input", str(corpus), "--k", "10", "--out-dir", str(tmp_path / "o")]
    )
    assert code == 1
    assert "all articles skipped" in capsys.readouterr().err


def test_analyze_short_article_policy_error(tmp_path, capsys):
    records = [
        CorpusRecord(
            id="long",
            article=" ".join(f"Alpha{j} beta{j}." for j in range(12)),
            gold_summary="Alpha1 beta1.",
        ),
        CorpusRecord(id="short", article="One. Two.", gold_summary="One."),
    ]
    corpus = tmp_path / "mixed.jsonl"
    save_corpus(records, corpus, "jsonl")
    out = tmp_path / "o"
    assert (
        main(
            [
                "analyze", "--input", str(corpus), "--k", "10",
                "--short-article-policy", "error", "--out-dir", str(out),
            ]
        )
        == 1
    )
    assert "short" in capsys.readouterr().err
    # skip policy reports on stderr and proceeds
    assert (
        main(
            [
                "analyze", "--input", str(corpus), "--k", "10",
                "--short-article-policy", "skip", "--out-dir", str(out),
            ]
        )
        == 0
    )
    assert "skipped 1 article" in capsys.readouterr().err
    doc = json.loads((out / "analysis.json").read_text(encoding="utf-8"))
    assert doc["gold_distribution"]["skipped_short_articles"] == 1


def test_analyze_missing_input_exit_3(tmp_path, capsys):
    code = main(
        ["analyze", "--input", str(tmp_path / "nope.jsonl"), "--out-dir", str(tmp_path)]
    )
    assert code == 3
    assert "i/o error" in capsys.readouterr().err


def test_analyze_bin_positions_index_scales(synth_corpus, tmp_path):
    out_n = tmp_path / "norm"
    out_i = tmp_path / "index"
    main(["analyze", "--input", str(synth_corpus), "--out-dir", str(out_n)])
    main(
        [
            "analyze", "--input", str(synth_corpus),
            "--bin-positions", "index", "--out-dir", str(out_i),
        ]
    )
    norm = {
        r[0]: float(r[1])
        for r in list(csv.reader((out_n / "metrics.csv").open(newline="")))[1:]
    }
    index = {
        r[0]: float(r[1])
        for r in list(csv.reader((out_i / "metrics.csv").open(newline="")))[1:]
    }
    for name in norm:
        assert index[name] == pytest.approx(10 * norm[name], abs=1e-9)


def test_rouge_identical_files(tmp_path, capsys):
    lines = "First summary here.\nAnother one there.\n"
    a = tmp_path / "a.txt"
    b = tmp_path / "b.txt"
    a.write_text(lines, encoding="utf-8")
    b.write_text(lines, encoding="utf-8")
    assert main(["rouge", "--candidates", str(a), "--references", str(b)]) == 0
    assert capsys.readouterr().out.strip() == "1.0000\t1.0000\t1.0000"


def test_rouge_disjoint_files(tmp_path, capsys):
    (tmp_path / "a.txt").write_text("alpha beta\n", encoding="utf-8")
    (tmp_path / "b.txt").write_text("gamma delta\n", encoding="utf-8")
    assert (
        main(
            [
                "rouge",
                "--candidates", str(tmp_path / "a.txt"),
                "--references", str(tmp_path / "b.txt"),
            ]
        )
        == 0
    )
    assert capsys.readouterr().out.strip() == "0.0000\t0.0000\t0.0000"


def test_rouge_two_pair_fixture(tmp_path, capsys):
    (tmp_path / "c.txt").write_text("the cat\nsame text\n", encoding="utf-8")
    (tmp_path / "r.txt").write_text("the cat sat\nsame text\n", encoding="utf-8")
    main(
        [
            "rouge",
            "--candidates", str(tmp_path / "c.txt"),
            "--references", str(tmp_path / "r.txt"),
        ]
    )
    out = capsys.readouterr().out.strip().split("\t")
    assert out[0] == "0.9000"  # mean of 0.8 and 1.0


def test_rouge_length_mismatch_exit_1(tmp_path, capsys):
    (tmp_path / "a.txt").write_text("one\n", encoding="utf-8")
    (tmp_path / "b.txt").write_text("one\ntwo\n", encoding="utf-8")
    code = main(
        [
            "rouge",
            "--candidates", str(tmp_path / "a.txt"),
            "--references", str(tmp_path / "b.txt"),
        ]
    )
    assert code == 1
    assert "data error" in capsys.readouterr().err


def test_stats_output(tmp_path, capsys):
    records = [
        CorpusRecord(id="a", article="One. Two. Three.", gold_summary="Only."),
        CorpusRecord(id="b", article="Uno. Dos. Tres.", gold_summary="Solo."),
    ]
    corpus = tmp_path / "c.jsonl"
    save_corpus(records, corpus, "jsonl")
    assert main(["stats", "--input", str(corpus)]) == 0
    out = capsys.readouterr().out
    assert "num_articles: 2" in out
    assert "avg_sentences_per_article: 3.0000" in out
    assert "total_summary_sentences: 2" in out
    assert "avg_sentences_per_summary: 1.0000" in out


def test_stats_abbrev_file_changes_split(tmp_path, capsys):
    records = [
        CorpusRecord(
            id="a",
            article="See newsabbr. Client said so. Done now.",
            gold_summary="Client said so.",
        )
    ]
    corpus = tmp_path / "c.jsonl"
    save_corpus(records, corpus, "jsonl")
    main(["stats", "--input", str(corpus)])
    assert "avg_sentences_per_article: 3.0000" in capsys.readouterr().out
    abbrev = tmp_path / "extra.txt"
    abbrev.write_text("newsabbr\n", encoding="utf-8")
    main(["stats", "--input", str(corpus), "--abbrev-file", str(abbrev)])
    assert "avg_sentences_per_article: 2.0000" in capsys.readouterr().out


def test_stats_missing_model_exit_1(tmp_path, capsys):
    records = [CorpusRecord(id="a", article="One. Two.", gold_summary="One.")]
    corpus = tmp_path / "c.jsonl"
    save_corpus(records, corpus, "jsonl")
    code = main(["stats", "--input", str(corpus), "--summary-source", "model:m"])
    assert code == 1


@pytest.fixture
def mock_endpoint():
    state = {"count": 0}

    class Handler(BaseHTTPRequestHandler):
        def do_POST(self):
            length = int(self.headers.get("Content-Length", 0))
            payload = json.loads(self.rfile.read(length))
            state["count"] += 1
            prompt = payload["messages"][0]["content"]
            if "Refuseme0" in prompt:
                self.send_response(451)
                self.send_header("Content-Length", "0")
                self.end_headers()
                return
            body = json.dumps(
                {"choices": [{"message": {"content": "- A generated line."}}]}
            ).encode()
            self.send_response(200)
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def log_message(self, *args):
            pass

    server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    yield f"http://127.0.0.1:{server.server_port}/v1/chat", state
    server.shutdown()
    server.server_close()


def test_generate_fills_corpus(tmp_path, capsys, mock_endpoint):
    url, state = mock_endpoint
    records = [
        CorpusRecord(id=f"r{i}", article=f"Alpha{i} one. Beta{i} two.", gold_summary=f"Alpha{i} one.")
        for i in range(4)
    ]
    corpus = tmp_path / "in.jsonl"
    out_path = tmp_path / "out.jsonl"
    save_corpus(records, corpus, "jsonl")
    code = main(
        [
            "generate",
            "--input", str(corpus),
            "--output", str(out_path),
            "--endpoint", url,
            "--model-name", "mock",
            "--template", "xsum",
        ]
    )
    assert code == 0
    assert state["count"] == 4
    out = capsys.readouterr().out
    assert "exact compliance: 100.0%, refusals: 0.0%" in out
    loaded = load_corpus(out_path, "jsonl")
    assert all(r.model_summaries["mock"] == "A generated line." for r in loaded)


def test_generate_refusal_keeps_empty_summary(tmp_path, capsys, mock_endpoint):
    url, _ = mock_endpoint
    records = [
        CorpusRecord(id="r0", article="Refuseme0 one. Beta two.", gold_summary="Beta two."),
        CorpusRecord(id="r1", article="Fine1 one. Beta two.", gold_summary="Beta two."),
        CorpusRecord(id="r2", article="Fine2 one. Beta two.", gold_summary="Beta two."),
        CorpusRecord(id="r3", article="Fine3 one. Beta two.", gold_summary="Beta two."),
    ]
    corpus = tmp_path / "in.jsonl"
    save_corpus(records, corpus, "jsonl")
    out_path = tmp_path / "out.jsonl"
    code = main(
        [
            "generate",
            "--input", str(corpus),
            "--output", str(out_path),
            "--endpoint", url,
            "--model-name", "mock",
            "--template", "xsum",
        ]
    )
    assert code == 0
    assert "refusals: 25.0%" in capsys.readouterr().out
    loaded = load_corpus(out_path, "jsonl")
    assert loaded[0].model_summaries["mock"] == ""
    assert loaded[1].model_summaries["mock"] != ""


def test_generate_requires_exactly_one_template_source(tmp_path, capsys):
    corpus = tmp_path / "c.jsonl"
    save_corpus(
        [CorpusRecord(id="a", article="A one.", gold_summary="A one.")], corpus, "jsonl"
    )
    code = main(
        [
            "generate",
            "--input", str(corpus),
            "--endpoint", "http://127.0.0.1:1/x",
            "--model-name", "m",
        ]
    )
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_generate_unreachable_endpoint_exit_4(tmp_path, capsys):
    corpus = tmp_path / "c.jsonl"
    save_corpus(
        [CorpusRecord(id="a", article="A one.", gold_summary="A one.")], corpus, "jsonl"
    )
    code = main(
        [
            "generate",
            "--input", str(corpus),
            "--endpoint", "http://127.0.0.1:9/unreachable",
            "--model-name", "m",
            "--template", "xsum",
            "--max-attempts", "2",
            "--backoff-base", "0",
            "--timeout", "0.5",
        ]
    )
    assert code == 4
    assert "remote error" in capsys.readouterr().err


def test_unknown_subcommand_exit_2():
    with pytest.raises(SystemExit) as excinfo:
        main(["frobnicate"])
    assert excinfo.value.code == 2


def test_csv_corpus_accepted_end_to_end(tmp_path):
    records = [
        CorpusRecord(
            id=f"c{i}",
            article=" ".join(f"Alpha{i}x{j} beta{i}x{j}." for j in range(6)),
            gold_summary=f"Alpha{i}x2 beta{i}x2.",
            model_summaries={"m": f"Alpha{i}x0 beta{i}x0."},
        )
        for i in range(3)
    ]
    corpus = tmp_path / "c.csv"
    save_corpus(records, corpus, "csv")
    out = tmp_path / "out"
    assert main(["analyze", "--input", str(corpus), "--k", "3", "--out-dir", str(out)]) == 0
    rows = list(csv.reader((out / "metrics.csv").open(newline="")))
    assert rows[1][0] == "m"
