"""Inference producing prediction-exchange rows.

Statement classifiers emit ``{statement_id, label, probs, model, split}``;
chunk models emit ``{manifesto_id, chunk_index, score | label, model,
split}``.  Both files feed the workbench's ``evaluate`` command unmodified.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

import torch

from .config import AdapterConfig
from .data import STANCE_BINS, ChunkRow, LabelMap, StatementRow, chunk_texts
from .training import count_truncated, encode_texts

log = logging.getLogger(__name__)


@torch.no_grad()
def _batched_logits(model, input_ids, attention_mask, batch_size: int):
    model.eval()
    outputs = []
    for start in range(0, len(input_ids), batch_size):
        outputs.append(model(input_ids[start : start + batch_size],
                             attention_mask[start : start + batch_size]))
    return torch.cat(outputs, dim=0)


def predict_statements(
    model,
    tokenizer,
    rows: list[StatementRow],
    config: AdapterConfig,
    label_map: LabelMap,
    model_name: str,
    split_name: str,
) -> list[dict]:
    if not rows:
        return []
    ids, mask = encode_texts(tokenizer, [r.text for r in rows], config.max_length)
    logits = _batched_logits(model, ids, mask, config.batch_size)
    probs = torch.softmax(logits, dim=-1)
    out = []
    for row, p in zip(rows, probs):
        arg = int(p.argmax())
        out.append({
            "statement_id": row.statement_id,
            "label": label_map.labels[arg],
            "probs": {lab: float(p[i]) for i, lab in enumerate(label_map.labels)},
            "model": model_name,
            "split": split_name,
        })
    return out


def predict_chunk_scores(
    model,
    tokenizer,
    chunks: list[ChunkRow],
    corpus_rows: list[StatementRow],
    config: AdapterConfig,
    model_name: str,
    split_name: str,
) -> list[dict]:
    """Regression scores per chunk, clamped only by the tanh output node."""
    if not chunks:
        return []
    texts = chunk_texts(chunks, corpus_rows)
    truncated = count_truncated(tokenizer, texts, config.chunk_max_length)
    if truncated:
        log.warning("%d of %d chunks exceed %d tokens and were truncated",
                    truncated, len(texts), config.chunk_max_length)
    ids, mask = encode_texts(tokenizer, texts, config.chunk_max_length)
    scores = _batched_logits(model, ids, mask, config.batch_size)
    return [
        {
            "manifesto_id": ch.manifesto_id,
            "chunk_index": ch.chunk_index,
            "score": float(s),
            "model": model_name,
            "split": split_name,
        }
        for ch, s in zip(chunks, scores)
    ]


def predict_chunk_stances(
    model,
    tokenizer,
    chunks: list[ChunkRow],
    corpus_rows: list[StatementRow],
    config: AdapterConfig,
    model_name: str,
    split_name: str,
) -> list[dict]:
    """5-way stance bin per chunk from the classifier track."""
    if not chunks:
        return []
    texts = chunk_texts(chunks, corpus_rows)
    truncated = count_truncated(tokenizer, texts, config.chunk_max_length)
    if truncated:
        log.warning("%d of %d chunks exceed %d tokens and were truncated",
                    truncated, len(texts), config.chunk_max_length)
    ids, mask = encode_texts(tokenizer, texts, config.chunk_max_length)
    logits = _batched_logits(model, ids, mask, config.batch_size)
    return [
        {
            "manifesto_id": ch.manifesto_id,
            "chunk_index": ch.chunk_index,
            "label": STANCE_BINS[int(l.argmax())],
            "model": model_name,
            "split": split_name,
        }
        for ch, l in zip(chunks, logits)
    ]


def write_exchange(rows: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
