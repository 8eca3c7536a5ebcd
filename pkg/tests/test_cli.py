import json

import pytest

from scale_bench import cli
from scale_bench.baseline import ChunkPrediction, ChunkPredictionSet, write_chunk_predictions
from scale_bench.corpus import build_corpus, load_corpus, write_corpus
from scale_bench.noisesim import gen_synthetic_corpus
from scale_bench.scales import load_scale
from conftest import make_manifesto


@pytest.fixture
def corpus_file(tmp_path):
    corpus = gen_synthetic_corpus(n_manifestos=30, min_statements=30,
                                  max_statements=40, seed=3)
    path = tmp_path / "corpus.jsonl"
    write_corpus(corpus, path)
    return path


def run(*argv):
    return cli.main([str(a) for a in argv])


# --------------------------------------------------------------------------
# Exit codes and plumbing
# --------------------------------------------------------------------------


def test_unknown_subcommand_is_usage_error(capsys):
    assert run("frobnicate") == cli.EXIT_USAGE
    capsys.readouterr()


def test_missing_file_is_data_error(tmp_path, capsys):
    code = run("score", "--corpus", tmp_path / "nope.jsonl")
    assert code == cli.EXIT_DATA
    err = capsys.readouterr().err
    record = json.loads(err.strip().splitlines()[-1])
    assert record["error"] == "FileNotFoundError"


def test_bad_data_is_data_error(tmp_path, capsys):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"statement_id": "s1"}\n', encoding="utf-8")
    code = run("ingest", "--format", "jsonl", "--in", bad,
               "--out", tmp_path / "out.jsonl", "--strict")
    assert code == cli.EXIT_DATA
    capsys.readouterr()


def test_constant_predictions_are_numeric_error(tmp_path, corpus_file, capsys):
    pset = ChunkPredictionSet(model="flat", split="s")
    for i in range(3):
        pset.add(ChunkPrediction(f"m{i:04d}", 0, score=0.0))
    pred = tmp_path / "flat.jsonl"
    write_chunk_predictions(pset, pred)
    code = run("evaluate", "--corpus", corpus_file, "--pred", pred,
               "--level", "manifesto", "--out", tmp_path / "eval")
    assert code == cli.EXIT_NUMERIC
    capsys.readouterr()


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def test_ingest_roundtrip(tmp_path, corpus_file, capsys):
    out = tmp_path / "canonical.jsonl"
    assert run("ingest", "--format", "jsonl", "--in", corpus_file,
               "--out", out, "--strict") == 0
    assert load_corpus(out).manifestos == load_corpus(corpus_file).manifestos
    manifest = json.loads((tmp_path / "canonical.jsonl.manifest.json").read_text())
    assert manifest["tool"] == "scale-bench"
    assert str(corpus_file) in manifest["inputs"]
    capsys.readouterr()


def test_score_prints_hand_computed_value(tmp_path, capsys):
    corpus = build_corpus([make_manifesto("m1", ["104", "104", "501", "106"])])
    path = tmp_path / "tiny.jsonl"
    write_corpus(corpus, path)
    assert run("score", "--corpus", path) == 0
    out = capsys.readouterr().out
    mid, score, stance = out.strip().split("\t")
    assert mid == "m1"
    assert float(score) == pytest.approx(0.25)
    assert stance == "centre_right"


def test_registry_dump_is_loadable_scale(tmp_path, capsys):
    out = tmp_path / "registry.json"
    assert run("registry", "--dump", "--out", out) == 0
    scale = load_scale(out)
    assert len(scale.right) == 13
    capsys.readouterr()


def test_split_command_writes_folds(tmp_path, corpus_file, capsys):
    out = tmp_path / "folds"
    assert run("split", "--mode", "xcountry", "--corpus", corpus_file,
               "--out", out, "--dev-fraction", "0", "--seed", "4") == 0
    folds = sorted(out.glob("xcountry-*.json"))
    assert len(folds) == 4  # generator used 4 countries
    data = json.loads(folds[0].read_text())
    assert data["test"]
    assert not set(data["train"]) & set(data["test"])
    capsys.readouterr()


def test_full_pipeline_and_determinism(tmp_path, corpus_file, capsys):
    splits_dir = tmp_path / "splits"
    assert run("split", "--mode", "xtime", "--corpus", corpus_file, "--out",
               splits_dir, "--seed", "1") == 0
    split_file = splits_dir / "xtime-2019.json"

    model = tmp_path / "model.npz"
    assert run("train", "--corpus", corpus_file, "--split", split_file,
               "--space", "rile3", "--model-out", model,
               "--epochs", "3", "--hash-dim", "4096") == 0

    preds = tmp_path / "preds.jsonl"
    assert run("predict", "--model", model, "--corpus", corpus_file,
               "--split", split_file, "--out", preds) == 0

    eval_a = tmp_path / "eval_a"
    eval_b = tmp_path / "eval_b"
    for out_dir in (eval_a, eval_b):
        assert run("evaluate", "--corpus", corpus_file, "--pred", preds,
                   "--level", "statement", "--split", split_file,
                   "--out", out_dir) == 0
        assert run("evaluate", "--corpus", corpus_file, "--pred", preds,
                   "--level", "manifesto", "--out", out_dir / "man") == 0
    assert (eval_a / "metrics.json").read_bytes() == (eval_b / "metrics.json").read_bytes()
    assert ((eval_a / "man" / "error_report.json").read_bytes()
            == (eval_b / "man" / "error_report.json").read_bytes())
    assert ((eval_a / "man" / "scatter.csv").read_bytes()
            == (eval_b / "man" / "scatter.csv").read_bytes())

    report = tmp_path / "report.csv"
    assert run("report", "--in", eval_a, "--out", report) == 0
    lines = report.read_text().strip().splitlines()
    assert lines[0].startswith("path,level,model,split,accuracy")
    assert len(lines) >= 3  # two reports + mean row
    capsys.readouterr()


def test_majority_algo_cli(tmp_path, corpus_file, capsys):
    model = tmp_path / "maj.json"
    assert run("train", "--corpus", corpus_file, "--space", "rile3",
               "--algo", "majority", "--model-out", model) == 0
    preds = tmp_path / "maj_preds.jsonl"
    assert run("predict", "--model", model, "--corpus", corpus_file,
               "--out", preds) == 0
    first = json.loads(preds.read_text().splitlines()[0])
    assert first["model"] == "majority"
    capsys.readouterr()


def test_chunk_command_and_chunk_eval(tmp_path, capsys):
    corpus = build_corpus([
        make_manifesto("m1", ["104"] * 6, texts=["word " * 400] * 6),
    ])
    cpath = tmp_path / "c.jsonl"
    write_corpus(corpus, cpath)
    chunks = tmp_path / "chunks.jsonl"
    assert run("chunk", "--corpus", cpath, "--out", chunks,
               "--max-tokens", "1000", "--min-tokens", "300") == 0
    rows = [json.loads(line) for line in chunks.read_text().splitlines()]
    assert len(rows) == 3
    assert all(r["token_count"] == 800 for r in rows)

    pset = ChunkPredictionSet(model="stub", split="s")
    for r in rows:
        pset.add(ChunkPrediction(r["manifesto_id"], r["chunk_index"], label="hard_right"))
    pred = tmp_path / "chunk_preds.jsonl"
    write_chunk_predictions(pset, pred)
    out = tmp_path / "chunk_eval"
    assert run("evaluate", "--corpus", cpath, "--pred", pred, "--level", "chunk",
               "--chunks", chunks, "--out", out) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["level"] == "chunk-stance"
    assert metrics["accuracy"] == 1.0
    capsys.readouterr()


def test_manifesto_stance_eval_from_labelled_chunks(tmp_path, capsys):
    corpus = build_corpus([
        make_manifesto("m1", ["104"] * 4),  # gold score 1.0 -> hard_right
        make_manifesto("m2", ["501"] * 4),  # gold score 0.0 -> centrist
    ])
    cpath = tmp_path / "c.jsonl"
    write_corpus(corpus, cpath)
    pset = ChunkPredictionSet(model="stub", split="s")
    pset.add(ChunkPrediction("m1", 0, label="hard_right"))
    pset.add(ChunkPrediction("m1", 1, label="centrist"))
    pset.add(ChunkPrediction("m1", 2, label="hard_right"))
    pset.add(ChunkPrediction("m2", 0, label="centrist"))
    pred = tmp_path / "stance.jsonl"
    write_chunk_predictions(pset, pred)
    out = tmp_path / "stance_eval"
    assert run("evaluate", "--corpus", cpath, "--pred", pred,
               "--level", "manifesto", "--out", out) == 0
    metrics = json.loads((out / "metrics.json").read_text())
    assert metrics["level"] == "manifesto-stance"
    assert metrics["accuracy"] == 1.0
    capsys.readouterr()


def test_simulate_command(tmp_path, capsys):
    confusion = tmp_path / "confusion.json"
    confusion.write_text(json.dumps({
        "labels": ["right", "left", "other"],
        "counts": [[46, 20, 33], [8, 66, 26], [9, 16, 75]],
    }), encoding="utf-8")
    out = tmp_path / "sim"
    assert run("simulate", "--corpus",
               "synthetic:n_manifestos=40,min_statements=60,max_statements=80,seed=5",
               "--confusion", confusion, "--replicates", "3", "--seed", "12",
               "--out", out) == 0
    aggregates = json.loads((out / "aggregates.json").read_text())
    assert aggregates[0]["replicates"] == 3
    assert 0 < aggregates[0]["mean_r"] <= 1
    sweep_lines = (out / "sweep.csv").read_text().strip().splitlines()
    assert len(sweep_lines) == 4  # header + 3 replicates
    capsys.readouterr()


def test_config_file_defaults_and_override(tmp_path, corpus_file, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({
        "split": {"mode": "xtime", "dev-fraction": 0.2, "seed": 17},
    }), encoding="utf-8")
    out1 = tmp_path / "s1"
    assert run("--config", config, "split", "--corpus", corpus_file,
               "--out", out1) == 0
    data = json.loads((out1 / "xtime-2019.json").read_text())
    assert data["metadata"]["dev_fraction"] == 0.2
    assert data["metadata"]["dev_seed"] == 17
    # explicit flag beats the config value
    out2 = tmp_path / "s2"
    assert run("--config", config, "split", "--corpus", corpus_file,
               "--out", out2, "--dev-fraction", "0.3") == 0
    data2 = json.loads((out2 / "xtime-2019.json").read_text())
    assert data2["metadata"]["dev_fraction"] == 0.3
    capsys.readouterr()
