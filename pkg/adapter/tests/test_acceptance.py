"""Secondary-component acceptance: adapter outputs conform to the exchange
schema and drive the workbench's evaluation unmodified; tiny-model smoke
fine-tunes show decreasing loss and correctly shaped/ranged outputs.

Full-scale bases (multilingual encoders, long-input models) are best-effort
by design and not gated here.
"""

import json

from scale_bench_adapter.config import AdapterConfig
from scale_bench_adapter.data import (
    STANCE_BINS,
    LabelMap,
    read_chunks,
    read_corpus_rows,
)
from scale_bench_adapter.models import load_tokenizer
from scale_bench_adapter.predicting import (
    predict_chunk_scores,
    predict_chunk_stances,
    predict_statements,
    write_exchange,
)
from scale_bench_adapter.training import train_chunk_model, train_statement_classifier
from conftest import scale_bench


def test_statement_track_drives_primary_evaluation(tiny_model_dir, statement_corpus,
                                                   scale_file, tmp_path):
    rows = read_corpus_rows(statement_corpus)
    config = AdapterConfig(
        base_model=str(tiny_model_dir), scale_file=str(scale_file),
        epochs=2, learning_rate=5e-3, batch_size=16, seed=31,
        head_hidden=16, max_length=32,
    )
    label_map = LabelMap.rile3(scale_file)
    model, tokenizer, result = train_statement_classifier(rows, [], config, label_map)

    losses = result.epoch_losses
    assert losses[-1] < losses[0], "smoke fine-tune must reduce the loss"

    preds = predict_statements(model, tokenizer, rows, config, label_map,
                               model_name="tiny-encoder", split_name="fixture")
    assert len(preds) == len(rows)
    for p in preds[:20]:
        assert set(p["probs"]) == set(label_map.labels)
        assert abs(sum(p["probs"].values()) - 1.0) < 1e-6
        assert p["label"] in label_map.labels
    pred_path = tmp_path / "statement_preds.jsonl"
    write_exchange(preds, pred_path)

    out_stmt = tmp_path / "eval_statement"
    proc = scale_bench("evaluate", "--corpus", statement_corpus, "--pred", pred_path,
                       "--level", "statement", "--out", out_stmt)
    assert proc.returncode == 0, proc.stderr
    metrics = json.loads((out_stmt / "metrics.json").read_text())
    assert metrics["model"] == "tiny-encoder"
    assert 0.0 <= metrics["weighted_f1"] <= 1.0

    out_man = tmp_path / "eval_manifesto"
    proc = scale_bench("evaluate", "--corpus", statement_corpus, "--pred", pred_path,
                       "--level", "manifesto", "--out", out_man)
    assert proc.returncode == 0, proc.stderr
    report = json.loads((out_man / "error_report.json").read_text())
    assert -1.0 <= report["spearman_r"] <= 1.0
    print("\n[PASS] statement track: 3-way head, decreasing loss, exchange file "
          f"evaluated by the workbench (acc={metrics['accuracy']:.2f}, "
          f"manifesto r={report['spearman_r']:.2f})")


def test_chunk_regression_track_drives_primary_evaluation(tiny_model_dir,
                                                          chunk_fixture, tmp_path):
    corpus_path, chunks_path = chunk_fixture
    rows = read_corpus_rows(corpus_path)
    chunks = read_chunks(chunks_path)
    config = AdapterConfig(
        base_model=str(tiny_model_dir), track="long-input-regressor",
        epochs=3, learning_rate=5e-3, batch_size=8, seed=37,
        head_hidden=16, chunk_max_length=512,
    )
    model, tokenizer, result = train_chunk_model(chunks, [], rows, config)
    losses = result.epoch_losses
    assert losses[-1] < losses[0], "regression smoke must reduce MSE"

    preds = predict_chunk_scores(model, tokenizer, chunks, rows, config,
                                 model_name="tiny-lit", split_name="fixture")
    assert len(preds) == len(chunks)
    assert all(-1.0 <= p["score"] <= 1.0 for p in preds)
    pred_path = tmp_path / "chunk_scores.jsonl"
    write_exchange(preds, pred_path)

    out_chunk = tmp_path / "eval_chunk"
    proc = scale_bench("evaluate", "--corpus", corpus_path, "--pred", pred_path,
                       "--level", "chunk", "--chunks", chunks_path,
                       "--out", out_chunk)
    assert proc.returncode == 0, proc.stderr
    report = json.loads((out_chunk / "error_report.json").read_text())

    out_man = tmp_path / "eval_chunk_manifesto"
    proc = scale_bench("evaluate", "--corpus", corpus_path, "--pred", pred_path,
                       "--level", "manifesto", "--out", out_man)
    assert proc.returncode == 0, proc.stderr
    print("[PASS] chunk regression track: tanh scores in [-1,1], decreasing MSE, "
          f"chunk and manifesto evaluation both accepted (chunk r="
          f"{report['spearman_r']:.2f})")


def test_chunk_classifier_track_drives_primary_evaluation(tiny_model_dir,
                                                          chunk_fixture, tmp_path):
    corpus_path, chunks_path = chunk_fixture
    rows = read_corpus_rows(corpus_path)
    chunks = read_chunks(chunks_path)
    config = AdapterConfig(
        base_model=str(tiny_model_dir), track="long-input-classifier",
        epochs=2, learning_rate=5e-3, batch_size=8, seed=41,
        head_hidden=16, chunk_max_length=512,
    )
    model, tokenizer, result = train_chunk_model(chunks, [], rows, config)
    assert result.epoch_losses[-1] < result.epoch_losses[0]

    preds = predict_chunk_stances(model, tokenizer, chunks, rows, config,
                                  model_name="tiny-lit-5way", split_name="fixture")
    assert all(p["label"] in STANCE_BINS for p in preds)
    pred_path = tmp_path / "chunk_stances.jsonl"
    write_exchange(preds, pred_path)

    out_dir = tmp_path / "eval_stance"
    proc = scale_bench("evaluate", "--corpus", corpus_path, "--pred", pred_path,
                       "--level", "chunk", "--chunks", chunks_path, "--out", out_dir)
    assert proc.returncode == 0, proc.stderr
    metrics = json.loads((out_dir / "metrics.json").read_text())
    assert metrics["level"] == "chunk-stance"
    assert set(metrics["support"]) == set(STANCE_BINS)
    print("[PASS] chunk classifier track: 5-way label space sized correctly, "
          f"stance exchange file evaluated (acc={metrics['accuracy']:.2f})")
