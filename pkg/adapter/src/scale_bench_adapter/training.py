"""Fine-tuning loops: cross-entropy for statement/chunk classification,
MSE for chunk-score regression, AdamW throughout, optional dev-accuracy
checkpointing."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import torch
from torch.utils.data import DataLoader, TensorDataset

from .config import AdapterConfig
from .data import ChunkRow, LabelMap, StatementRow, chunk_texts, stance_bin_label
from .models import (
    EncoderWithHead,
    build_chunk_classifier,
    build_chunk_regressor,
    build_statement_classifier,
    load_tokenizer,
)

log = logging.getLogger(__name__)


@dataclass
class TrainResult:
    history: list[dict] = field(default_factory=list)
    best_epoch: int | None = None

    @property
    def epoch_losses(self) -> list[float]:
        return [h["mean_loss"] for h in self.history]


def encode_texts(tokenizer, texts: list[str], max_length: int):
    out = tokenizer(
        list(texts),
        padding=True,
        truncation=True,
        max_length=max_length,
        return_tensors="pt",
    )
    return out["input_ids"], out["attention_mask"]


def count_truncated(tokenizer, texts: list[str], max_length: int) -> int:
    """How many texts lose tokens to the length budget."""
    full = tokenizer(list(texts), padding=False, truncation=False)["input_ids"]
    return sum(1 for ids in full if len(ids) > max_length)


def _loader(tensors, batch_size: int, seed: int, shuffle: bool) -> DataLoader:
    generator = torch.Generator()
    generator.manual_seed(seed)
    return DataLoader(
        TensorDataset(*tensors),
        batch_size=batch_size,
        shuffle=shuffle,
        generator=generator,
    )


def _run_training(model: EncoderWithHead, loss_fn, train_tensors, dev_eval,
                  config: AdapterConfig) -> TrainResult:
    optimizer = torch.optim.AdamW(model.parameters(), lr=config.learning_rate)
    result = TrainResult()
    best_metric = None
    best_state = None
    for epoch in range(config.epochs):
        loader = _loader(train_tensors, config.batch_size,
                         seed=config.seed + epoch, shuffle=True)
        model.train()
        batch_losses = []
        for batch in loader:
            optimizer.zero_grad()
            input_ids, attention_mask, target = batch
            output = model(input_ids, attention_mask)
            loss = loss_fn(output, target)
            loss.backward()
            optimizer.step()
            batch_losses.append(float(loss.detach()))
        entry = {
            "epoch": epoch,
            "mean_loss": sum(batch_losses) / len(batch_losses),
            "batch_losses": batch_losses,
        }
        if dev_eval is not None:
            metric = dev_eval(model)
            entry["dev_metric"] = metric
            if config.dev_checkpoint and (best_metric is None or metric > best_metric):
                best_metric = metric
                best_state = {k: v.detach().clone() for k, v in model.state_dict().items()}
                result.best_epoch = epoch
        result.history.append(entry)
    if best_state is not None:
        model.load_state_dict(best_state)
    return result


@torch.no_grad()
def classifier_accuracy(model: EncoderWithHead, input_ids, attention_mask, targets,
                        batch_size: int) -> float:
    model.eval()
    hits = 0
    for start in range(0, len(targets), batch_size):
        logits = model(input_ids[start : start + batch_size],
                       attention_mask[start : start + batch_size])
        hits += int((logits.argmax(dim=-1) == targets[start : start + batch_size]).sum())
    return hits / len(targets)


def train_statement_classifier(
    train_rows: list[StatementRow],
    dev_rows: list[StatementRow],
    config: AdapterConfig,
    label_map: LabelMap,
):
    """Fine-tune an encoder + MLP head on gold statement labels.

    Returns (model, tokenizer, TrainResult).  The dev metric is accuracy;
    with ``dev_checkpoint`` the best epoch's weights win.
    """
    if not train_rows:
        raise ValueError("no training statements")
    torch.manual_seed(config.seed)
    tokenizer = load_tokenizer(config)
    model = build_statement_classifier(config, n_labels=len(label_map.labels))

    ids, mask = encode_texts(tokenizer, [r.text for r in train_rows], config.max_length)
    targets = torch.tensor([label_map.index(label_map.label_for(r.code))
                            for r in train_rows])
    dev_eval = None
    if dev_rows:
        dev_ids, dev_mask = encode_texts(tokenizer, [r.text for r in dev_rows],
                                         config.max_length)
        dev_targets = torch.tensor([label_map.index(label_map.label_for(r.code))
                                    for r in dev_rows])

        def dev_eval(m):
            return classifier_accuracy(m, dev_ids, dev_mask, dev_targets,
                                       config.batch_size)

    loss_fn = torch.nn.CrossEntropyLoss()
    result = _run_training(model, loss_fn, (ids, mask, targets), dev_eval, config)
    return model, tokenizer, result


def train_chunk_model(
    train_chunks: list[ChunkRow],
    dev_chunks: list[ChunkRow],
    corpus_rows: list[StatementRow],
    config: AdapterConfig,
):
    """Fine-tune a long-input chunk model.

    Track "long-input-regressor" fits chunk scores with MSE through a tanh
    output node; "long-input-classifier" fits 5-way stance bins of the gold
    chunk scores with cross-entropy.  Returns (model, tokenizer, TrainResult).
    """
    if not train_chunks:
        raise ValueError("no training chunks")
    if config.track not in ("long-input-regressor", "long-input-classifier"):
        raise ValueError(f"not a chunk track: {config.track!r}")
    torch.manual_seed(config.seed)
    tokenizer = load_tokenizer(config)

    texts = chunk_texts(train_chunks, corpus_rows)
    truncated = count_truncated(tokenizer, texts, config.chunk_max_length)
    if truncated:
        log.warning("%d of %d training chunks exceed %d tokens and are truncated",
                    truncated, len(texts), config.chunk_max_length)
    ids, mask = encode_texts(tokenizer, texts, config.chunk_max_length)

    if config.track == "long-input-regressor":
        model = build_chunk_regressor(config)
        targets = torch.tensor([c.gold_rile for c in train_chunks], dtype=torch.float32)
        loss_fn = torch.nn.MSELoss()
    else:
        model = build_chunk_classifier(config, n_labels=5)
        bins = [stance_bin_label(c.gold_rile) for c in train_chunks]
        index = {name: i for i, name in
                 enumerate(("hard_left", "centre_left", "centrist",
                            "centre_right", "hard_right"))}
        targets = torch.tensor([index[b] for b in bins])
        loss_fn = torch.nn.CrossEntropyLoss()

    dev_eval = None
    if dev_chunks:
        dev_texts = chunk_texts(dev_chunks, corpus_rows)
        dev_ids, dev_mask = encode_texts(tokenizer, dev_texts, config.chunk_max_length)
        if config.track == "long-input-regressor":
            dev_targets = torch.tensor([c.gold_rile for c in dev_chunks],
                                       dtype=torch.float32)

            @torch.no_grad()
            def dev_eval(m):
                m.eval()
                preds = m(dev_ids, dev_mask)
                # negated MSE so that "greater is better" holds for checkpoints
                return -float(torch.mean((preds - dev_targets) ** 2))

        else:
            dev_bins = [stance_bin_label(c.gold_rile) for c in dev_chunks]
            index5 = {name: i for i, name in
                      enumerate(("hard_left", "centre_left", "centrist",
                                 "centre_right", "hard_right"))}
            dev_targets = torch.tensor([index5[b] for b in dev_bins])

            def dev_eval(m):
                return classifier_accuracy(m, dev_ids, dev_mask, dev_targets,
                                           config.batch_size)

    result = _run_training(model, loss_fn, (ids, mask, targets), dev_eval, config)
    return model, tokenizer, result
