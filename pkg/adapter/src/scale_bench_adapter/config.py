"""Adapter configuration.

Four tracks are supported: statement classification with a multilingual
encoder, statement classification over machine-translated English text,
and long-input chunk models in regression or 5-way classification form.
Training defaults: AdamW with learning rate 1e-5; two epochs for the
cross-country setting; five epochs with dev-accuracy checkpointing for the
cross-time setting.  Batch size and maximum sequence lengths are this
adapter's own defaults.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

TRACKS = (
    "multilingual-encoder",
    "mt-then-english-encoder",
    "long-input-regressor",
    "long-input-classifier",
)

LABEL_SPACES = ("rile3", "cmp", "stance5")


@dataclass(frozen=True)
class AdapterConfig:
    track: str = "multilingual-encoder"
    base_model: str = "xlm-roberta-base"  # HF name or local path
    revision: str | None = None  # pin an exact checkpoint revision
    label_space: str = "rile3"
    scale_file: str | None = None  # registry/scale JSON from the primary CLI
    epochs: int = 2
    learning_rate: float = 1e-5
    batch_size: int = 16
    seed: int = 42
    dev_checkpoint: bool = False
    max_length: int = 256  # tokens per statement; chunk tracks use chunk_max_length
    chunk_max_length: int = 4096
    head_hidden: int = 1024
    pooling: str = "cls"  # cls | mean

    def __post_init__(self):
        if self.track not in TRACKS:
            raise ValueError(f"unknown track {self.track!r}")
        if self.label_space not in LABEL_SPACES:
            raise ValueError(f"unknown label space {self.label_space!r}")
        if self.pooling not in ("cls", "mean"):
            raise ValueError(f"unknown pooling {self.pooling!r}")

    @staticmethod
    def for_setting(setting: str, **overrides) -> "AdapterConfig":
        """Preset recipes: 'xcountry' (2 epochs) or 'xtime' (5 epochs +
        dev checkpoint)."""
        if setting == "xcountry":
            base = AdapterConfig(epochs=2, dev_checkpoint=False)
        elif setting == "xtime":
            base = AdapterConfig(epochs=5, dev_checkpoint=True)
        else:
            raise ValueError(f"unknown setting {setting!r}")
        return replace(base, **overrides)

    @staticmethod
    def from_json(path: str | Path) -> "AdapterConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return AdapterConfig(**raw)

    def to_dict(self) -> dict:
        return {
            "track": self.track,
            "base_model": self.base_model,
            "revision": self.revision,
            "label_space": self.label_space,
            "scale_file": self.scale_file,
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "dev_checkpoint": self.dev_checkpoint,
            "max_length": self.max_length,
            "chunk_max_length": self.chunk_max_length,
            "head_hidden": self.head_hidden,
            "pooling": self.pooling,
        }
