"""Statement classifiers and the prediction-exchange file format.

Two self-contained baselines ship here: a majority-class model and a
softmax regression over hashed bag-of-words features (word unigrams and
bigrams, signed feature hashing) trained with mini-batch SGD.  Anything
that writes the exchange format - one JSON object per statement with
``{statement_id, label, probs?, model, split}`` - plugs into the same
evaluation machinery, which is how external neural predictors attach.
"""

from __future__ import annotations

import json
import re
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from . import scales
from .corpus import Statement
from .errors import DataError, NumericError, SchemaError

Example = tuple[str, str]  # (text, label)

_WORD = re.compile(r"\w+", re.UNICODE)

PROB_TOLERANCE = 1e-6


# --------------------------------------------------------------------------
# Label spaces
# --------------------------------------------------------------------------


def _code_sort_key(code: str) -> tuple[int, str]:
    return (len(code.split(".", 1)[0]), code)


@dataclass(frozen=True)
class LabelSpace:
    mode: str  # "cmp" | "rile3"
    labels: tuple[str, ...]

    @staticmethod
    def rile3() -> "LabelSpace":
        return LabelSpace(mode="rile3", labels=tuple(sorted(c.value for c in scales.RileClass)))

    @staticmethod
    def cmp() -> "LabelSpace":
        codes = sorted(scales.REGISTRY, key=_code_sort_key)
        return LabelSpace(mode="cmp", labels=tuple(codes))

    @staticmethod
    def for_mode(mode: str) -> "LabelSpace":
        if mode == "rile3":
            return LabelSpace.rile3()
        if mode == "cmp":
            return LabelSpace.cmp()
        raise ValueError(f"unknown label space {mode!r}")


def statement_label(code: str, space: LabelSpace, scale: scales.Scale = scales.RILE) -> str:
    """Gold training label of a category code under the space."""
    if space.mode == "rile3":
        return scale.classify(code).value
    return code


def labeled_examples(statements: Iterable[Statement], space: LabelSpace,
                     scale: scales.Scale = scales.RILE) -> list[Example]:
    return [(s.text, statement_label(s.code, space, scale)) for s in statements]


# --------------------------------------------------------------------------
# Feature hashing
# --------------------------------------------------------------------------


def featurize(text: str, hash_dim: int) -> dict[int, float]:
    """Signed hashed counts of lowercase word unigrams and bigrams.

    Stable across runs and platforms (crc32-based, no process salt).
    """
    if hash_dim <= 0 or hash_dim & (hash_dim - 1):
        raise ValueError(f"hash_dim must be a power of two, got {hash_dim}")
    tokens = _WORD.findall(text.lower())
    grams = tokens + [f"{a} {b}" for a, b in zip(tokens, tokens[1:])]
    vec: dict[int, float] = {}
    for gram in grams:
        data = gram.encode("utf-8")
        bucket = zlib.crc32(data) & (hash_dim - 1)
        sign = 1.0 if zlib.crc32(b"#" + data) & 1 else -1.0
        vec[bucket] = vec.get(bucket, 0.0) + sign
    return vec


# --------------------------------------------------------------------------
# Models
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 5
    learning_rate: float = 0.1
    hash_dim: int = 2**18
    batch_size: int = 32
    seed: int = 42
    dev_checkpoint: bool = True

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "hash_dim": self.hash_dim,
            "batch_size": self.batch_size,
            "seed": self.seed,
            "dev_checkpoint": self.dev_checkpoint,
        }


@dataclass
class MajorityModel:
    label: str
    space: LabelSpace
    name: str = "majority"

    def predict_one(self, text: str) -> tuple[str, dict[str, float]]:
        probs = {lab: (1.0 if lab == self.label else 0.0) for lab in self.space.labels}
        return self.label, probs


def majority_label(train: Sequence[Example], space: LabelSpace) -> MajorityModel:
    """Constant classifier predicting the most frequent training label.

    Ties break toward the ascending label code.
    """
    if not train:
        raise DataError("empty training set")
    counts: dict[str, int] = {}
    for _, label in train:
        if label not in space.labels:
            raise DataError(f"training label {label!r} outside the label space")
        counts[label] = counts.get(label, 0) + 1
    best = max(counts.values())
    label = min(lab for lab, n in counts.items() if n == best)
    return MajorityModel(label=label, space=space)


@dataclass
class LinearModel:
    weights: np.ndarray  # [num_labels, hash_dim]
    bias: np.ndarray  # [num_labels]
    space: LabelSpace
    config: TrainConfig
    name: str = "linear"
    # (epoch, mean training loss, dev accuracy or None), in training order
    history: list[tuple[int, float, float | None]] = field(default_factory=list)
    best_epoch: int | None = None

    def _logits(self, feats: dict[int, float]) -> np.ndarray:
        z = self.bias.copy()
        if feats:
            cols = np.fromiter(feats.keys(), dtype=np.int64, count=len(feats))
            vals = np.fromiter(feats.values(), dtype=np.float64, count=len(feats))
            z += self.weights[:, cols] @ vals
        return z

    def predict_one(self, text: str) -> tuple[str, dict[str, float]]:
        z = self._logits(featurize(text, self.config.hash_dim))
        z -= z.max()
        p = np.exp(z)
        p /= p.sum()
        label = self.space.labels[int(np.argmax(p))]
        return label, {lab: float(p[i]) for i, lab in enumerate(self.space.labels)}


def _accuracy(model: LinearModel, examples: Sequence[Example]) -> float:
    hit = sum(1 for text, label in examples if model.predict_one(text)[0] == label)
    return hit / len(examples)


def train_linear(train: Sequence[Example], dev: Sequence[Example],
                 space: LabelSpace, config: TrainConfig = TrainConfig()) -> LinearModel:
    """Softmax regression by mini-batch SGD on hashed features.

    Weights start at zero and updates are applied once per batch, so a zero
    learning rate is a no-op.  When ``dev`` is non-empty and checkpointing
    is enabled, the epoch with the best dev accuracy wins (earliest on
    ties); otherwise the final epoch's weights are returned.
    """
    if not train:
        raise DataError("empty training set")
    index = {lab: i for i, lab in enumerate(space.labels)}
    try:
        ys = np.array([index[label] for _, label in train], dtype=np.int64)
    except KeyError as exc:
        raise DataError(f"training label {exc.args[0]!r} outside the label space") from exc
    feats = [featurize(text, config.hash_dim) for text, _ in train]

    n_labels = len(space.labels)
    model = LinearModel(
        weights=np.zeros((n_labels, config.hash_dim)),
        bias=np.zeros(n_labels),
        space=space,
        config=config,
    )
    best_acc = -1.0
    best_state: tuple[np.ndarray, np.ndarray, int] | None = None
    rng = np.random.default_rng(config.seed)
    n = len(train)

    for epoch in range(config.epochs):
        order = rng.permutation(n)
        total_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            grad_cols: dict[int, np.ndarray] = {}
            grad_bias = np.zeros(n_labels)
            for i in batch:
                z = model._logits(feats[i])
                z -= z.max()
                expz = np.exp(z)
                p = expz / expz.sum()
                loss = -np.log(max(p[ys[i]], 1e-300))
                total_loss += loss
                gz = p.copy()
                gz[ys[i]] -= 1.0
                grad_bias += gz
                for col, val in feats[i].items():
                    acc = grad_cols.get(col)
                    if acc is None:
                        acc = grad_cols[col] = np.zeros(n_labels)
                    acc += gz * val
            step = config.learning_rate / len(batch)
            for col, g in grad_cols.items():
                model.weights[:, col] -= step * g
            model.bias -= step * grad_bias
        mean_loss = total_loss / n
        if not np.isfinite(mean_loss):
            raise NumericError(
                f"non-finite training loss at epoch {epoch} "
                f"(lr={config.learning_rate}, batch_size={config.batch_size})"
            )
        dev_acc = None
        if dev and config.dev_checkpoint:
            dev_acc = _accuracy(model, dev)
            if dev_acc > best_acc:
                best_acc = dev_acc
                best_state = (model.weights.copy(), model.bias.copy(), epoch)
        model.history.append((epoch, float(mean_loss), dev_acc))

    if best_state is not None:
        model.weights, model.bias, model.best_epoch = best_state
    return model


def predict(model, statements: Iterable[Statement], split: str = "") -> "PredictionSet":
    """Label every statement, recording probabilities and provenance."""
    pset = PredictionSet(model=model.name, split=split)
    for s in statements:
        label, probs = model.predict_one(s.text)
        pset.add(s.id, label, probs)
    return pset


# --------------------------------------------------------------------------
# Prediction exchange format
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Prediction:
    label: str
    probs: Mapping[str, float] | None = None


class PredictionSet:
    """Per-statement predicted labels keyed by statement id."""

    def __init__(self, model: str = "", split: str = ""):
        self.model = model
        self.split = split
        self.records: dict[str, Prediction] = {}

    def add(self, statement_id: str, label: str,
            probs: Mapping[str, float] | None = None) -> None:
        if statement_id in self.records:
            raise DataError(f"duplicate prediction for statement {statement_id!r}")
        if probs is not None:
            total = sum(probs.values())
            if abs(total - 1.0) > PROB_TOLERANCE:
                raise DataError(
                    f"probabilities for {statement_id!r} sum to {total}, not 1"
                )
        self.records[statement_id] = Prediction(label=label, probs=probs)

    @property
    def labels(self) -> dict[str, str]:
        return {sid: p.label for sid, p in self.records.items()}

    def __len__(self) -> int:
        return len(self.records)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, PredictionSet)
            and self.model == other.model
            and self.split == other.split
            and self.records == other.records
        )


def write_predictions(pset: PredictionSet, dest: IO[str] | str | Path) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as fh:
            write_predictions(pset, fh)
        return
    for sid in sorted(pset.records):
        p = pset.records[sid]
        row: dict = {"statement_id": sid, "label": p.label}
        if p.probs is not None:
            row["probs"] = {k: p.probs[k] for k in sorted(p.probs)}
        row["model"] = pset.model
        row["split"] = pset.split
        dest.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_predictions(path: str | Path) -> PredictionSet:
    pset: PredictionSet | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                sid = str(row["statement_id"])
                label = str(row["label"])
                model = str(row.get("model", ""))
                split = str(row.get("split", ""))
                probs = row.get("probs")
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise SchemaError(f"bad prediction record: {exc}", line=lineno) from exc
            if pset is None:
                pset = PredictionSet(model=model, split=split)
            elif (model, split) != (pset.model, pset.split):
                raise SchemaError(
                    f"provenance changed mid-file: ({model!r}, {split!r})", line=lineno
                )
            try:
                pset.add(sid, label, probs)
            except DataError as exc:
                raise SchemaError(str(exc), line=lineno) from exc
    if pset is None:
        raise DataError(f"{path}: no prediction records")
    return pset


# --------------------------------------------------------------------------
# Chunk-level exchange: {manifesto_id, chunk_index, score and/or label}
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ChunkPrediction:
    manifesto_id: str
    chunk_index: int
    score: float | None = None  # in [-1, 1]
    label: str | None = None  # stance bin name, for classifier tracks

    def __post_init__(self):
        if self.score is None and self.label is None:
            raise DataError(
                f"chunk {self.manifesto_id}/{self.chunk_index}: needs a score or a label"
            )
        if self.score is not None and not -1.0 <= self.score <= 1.0:
            raise DataError(
                f"chunk {self.manifesto_id}/{self.chunk_index}: score {self.score} "
                f"outside [-1, 1]"
            )


class ChunkPredictionSet:
    def __init__(self, model: str = "", split: str = ""):
        self.model = model
        self.split = split
        self.records: dict[tuple[str, int], ChunkPrediction] = {}

    def add(self, pred: ChunkPrediction) -> None:
        key = (pred.manifesto_id, pred.chunk_index)
        if key in self.records:
            raise DataError(f"duplicate chunk prediction {key}")
        self.records[key] = pred

    def by_manifesto(self) -> dict[str, list[ChunkPrediction]]:
        out: dict[str, list[ChunkPrediction]] = {}
        for (mid, _), pred in sorted(self.records.items()):
            out.setdefault(mid, []).append(pred)
        return out

    def __len__(self) -> int:
        return len(self.records)


def write_chunk_predictions(pset: ChunkPredictionSet, dest: IO[str] | str | Path) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as fh:
            write_chunk_predictions(pset, fh)
        return
    for key in sorted(pset.records):
        p = pset.records[key]
        row: dict = {"manifesto_id": p.manifesto_id, "chunk_index": p.chunk_index}
        if p.score is not None:
            row["score"] = p.score
        if p.label is not None:
            row["label"] = p.label
        row["model"] = pset.model
        row["split"] = pset.split
        dest.write(json.dumps(row, ensure_ascii=False) + "\n")


def read_chunk_predictions(path: str | Path) -> ChunkPredictionSet:
    pset: ChunkPredictionSet | None = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                pred = ChunkPrediction(
                    manifesto_id=str(row["manifesto_id"]),
                    chunk_index=int(row["chunk_index"]),
                    score=None if row.get("score") is None else float(row["score"]),
                    label=None if row.get("label") is None else str(row["label"]),
                )
                model = str(row.get("model", ""))
                split = str(row.get("split", ""))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError, DataError) as exc:
                raise SchemaError(f"bad chunk prediction: {exc}", line=lineno) from exc
            if pset is None:
                pset = ChunkPredictionSet(model=model, split=split)
            elif (model, split) != (pset.model, pset.split):
                raise SchemaError(
                    f"provenance changed mid-file: ({model!r}, {split!r})", line=lineno
                )
            try:
                pset.add(pred)
            except DataError as exc:
                raise SchemaError(str(exc), line=lineno) from exc
    if pset is None:
        raise DataError(f"{path}: no chunk predictions")
    return pset


# --------------------------------------------------------------------------
# Model container files
# --------------------------------------------------------------------------

_MODEL_MAGIC = "scale-bench-linear"
_MAJORITY_MAGIC = "scale-bench-majority"
_MODEL_VERSION = 1


def save_model(model: LinearModel | MajorityModel, path: str | Path) -> None:
    if isinstance(model, MajorityModel):
        payload = {
            "magic": _MAJORITY_MAGIC,
            "version": _MODEL_VERSION,
            "label": model.label,
            "space_mode": model.space.mode,
            "labels": list(model.space.labels),
        }
        Path(path).write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        return
    with open(path, "wb") as fh:
        np.savez_compressed(
            fh,
            magic=np.array(_MODEL_MAGIC),
            version=np.array(_MODEL_VERSION),
            weights=model.weights,
            bias=model.bias,
            labels=np.array(model.space.labels),
            space_mode=np.array(model.space.mode),
            config=np.array(json.dumps(model.config.to_dict(), sort_keys=True)),
        )


def _load_majority(path: Path) -> MajorityModel:
    payload = json.loads(path.read_text(encoding="utf-8"))
    if payload.get("magic") != _MAJORITY_MAGIC:
        raise DataError(f"{path}: not a model file")
    space = LabelSpace(mode=str(payload["space_mode"]),
                       labels=tuple(str(x) for x in payload["labels"]))
    return MajorityModel(label=str(payload["label"]), space=space)


def load_model(path: str | Path) -> LinearModel | MajorityModel:
    path = Path(path)
    with open(path, "rb") as fh:
        is_zip = fh.read(2) == b"PK"
    if not is_zip:
        try:
            return _load_majority(path)
        except (json.JSONDecodeError, KeyError, UnicodeDecodeError) as exc:
            raise DataError(f"{path}: not a model file ({exc})") from exc
    with np.load(path, allow_pickle=False) as data:
        try:
            if str(data["magic"]) != _MODEL_MAGIC:
                raise DataError(f"{path}: not a model file")
            if int(data["version"]) != _MODEL_VERSION:
                raise DataError(f"{path}: unsupported model version {data['version']}")
            cfg = json.loads(str(data["config"]))
            space = LabelSpace(mode=str(data["space_mode"]),
                               labels=tuple(str(x) for x in data["labels"]))
            return LinearModel(
                weights=data["weights"],
                bias=data["bias"],
                space=space,
                config=TrainConfig(**cfg),
            )
        except KeyError as exc:
            raise DataError(f"{path}: truncated model file (missing {exc})") from exc
