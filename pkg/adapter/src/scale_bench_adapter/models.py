"""Encoder + head architectures.

Classification: pooled encoder output into a 2-layer MLP (inner dimension
1024, tanh after the first layer).  Regression: the same shape with the
output layer reduced to a single node followed by tanh, mapping scores into
[-1, 1]; that final layer starts at zero, so an untrained regressor scores
everything 0.0 exactly.
"""

from __future__ import annotations

import torch
from torch import nn

from .config import AdapterConfig


class ClassifierHead(nn.Module):
    def __init__(self, in_dim: int, hidden: int, n_labels: int):
        super().__init__()
        self.dense = nn.Linear(in_dim, hidden)
        self.act = nn.Tanh()
        self.out = nn.Linear(hidden, n_labels)

    def forward(self, pooled):
        return self.out(self.act(self.dense(pooled)))


class RegressorHead(nn.Module):
    def __init__(self, in_dim: int, hidden: int):
        super().__init__()
        self.dense = nn.Linear(in_dim, hidden)
        self.act = nn.Tanh()
        self.out = nn.Linear(hidden, 1)
        nn.init.zeros_(self.out.weight)
        nn.init.zeros_(self.out.bias)

    def forward(self, pooled):
        return torch.tanh(self.out(self.act(self.dense(pooled)))).squeeze(-1)


class EncoderWithHead(nn.Module):
    def __init__(self, encoder, head: nn.Module, pooling: str = "cls"):
        super().__init__()
        self.encoder = encoder
        self.head = head
        self.pooling = pooling

    def forward(self, input_ids, attention_mask):
        hidden = self.encoder(
            input_ids=input_ids, attention_mask=attention_mask
        ).last_hidden_state
        if self.pooling == "cls":
            pooled = hidden[:, 0]
        else:
            mask = attention_mask.unsqueeze(-1).to(hidden.dtype)
            pooled = (hidden * mask).sum(dim=1) / mask.sum(dim=1).clamp(min=1)
        return self.head(pooled)


def load_encoder(config: AdapterConfig):
    from transformers import AutoModel

    try:
        return AutoModel.from_pretrained(config.base_model, revision=config.revision)
    except (OSError, ValueError) as exc:
        raise RuntimeError(
            f"cannot load base model {config.base_model!r} "
            f"(revision={config.revision}); pass a local path or check that the "
            f"checkpoint is downloadable: {exc}"
        ) from exc


def load_tokenizer(config: AdapterConfig):
    from transformers import AutoTokenizer

    try:
        return AutoTokenizer.from_pretrained(config.base_model, revision=config.revision)
    except (OSError, ValueError) as exc:
        raise RuntimeError(
            f"cannot load tokenizer for {config.base_model!r}: {exc}"
        ) from exc


def _hidden_size(encoder) -> int:
    return int(encoder.config.hidden_size)


def build_statement_classifier(config: AdapterConfig, n_labels: int) -> EncoderWithHead:
    encoder = load_encoder(config)
    head = ClassifierHead(_hidden_size(encoder), config.head_hidden, n_labels)
    return EncoderWithHead(encoder, head, pooling=config.pooling)


def build_chunk_regressor(config: AdapterConfig) -> EncoderWithHead:
    encoder = load_encoder(config)
    head = RegressorHead(_hidden_size(encoder), config.head_hidden)
    return EncoderWithHead(encoder, head, pooling=config.pooling)


def build_chunk_classifier(config: AdapterConfig, n_labels: int = 5) -> EncoderWithHead:
    encoder = load_encoder(config)
    head = ClassifierHead(_hidden_size(encoder), config.head_hidden, n_labels)
    return EncoderWithHead(encoder, head, pooling=config.pooling)
