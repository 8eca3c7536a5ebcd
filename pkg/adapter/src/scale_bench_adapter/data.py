"""Readers for the workbench file contracts.

The adapter shares no code with the main workbench; it consumes the
documented file formats: corpus JSONL (one statement object per line),
split JSON (train/dev/test manifesto-id lists), chunk JSONL, and a
scale/registry JSON for the 3-way label projection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

STANCE_BINS = ("hard_left", "centre_left", "centrist", "centre_right", "hard_right")
_STANCE_BOUNDS = (-0.6, -0.2, 0.2, 0.6)

RILE3_LABELS = ("left", "other", "right")


@dataclass(frozen=True)
class StatementRow:
    statement_id: str
    manifesto_id: str
    country: str
    language: str
    year: int
    position: int
    text: str
    code: str
    party: str = ""
    month: int = 1


@dataclass(frozen=True)
class ChunkRow:
    manifesto_id: str
    chunk_index: int
    statement_ids: tuple[str, ...]
    token_count: int
    gold_rile: float
    oversized: bool


def read_corpus_rows(path: str | Path) -> list[StatementRow]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                rows.append(
                    StatementRow(
                        statement_id=str(raw["statement_id"]),
                        manifesto_id=str(raw["manifesto_id"]),
                        country=str(raw["country"]),
                        language=str(raw["language"]),
                        year=int(raw["year"]),
                        position=int(raw["position"]),
                        text=str(raw["text"]),
                        code=str(raw["code"]),
                        party=str(raw.get("party", "")),
                        month=int(raw.get("month", 1)),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad corpus row: {exc}") from exc
    if not rows:
        raise ValueError(f"{path}: no statements")
    return rows


def read_split(path: str | Path) -> dict:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        return {
            "name": str(raw["name"]),
            "train": frozenset(raw["train"]),
            "dev": frozenset(raw["dev"]),
            "test": frozenset(raw["test"]),
        }
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{path}: not a split file: {exc}") from exc


def read_chunks(path: str | Path) -> list[ChunkRow]:
    chunks = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                chunks.append(
                    ChunkRow(
                        manifesto_id=str(raw["manifesto_id"]),
                        chunk_index=int(raw["chunk_index"]),
                        statement_ids=tuple(str(s) for s in raw["statement_ids"]),
                        token_count=int(raw["token_count"]),
                        gold_rile=float(raw["gold_rile"]),
                        oversized=bool(raw["oversized"]),
                    )
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad chunk row: {exc}") from exc
    if not chunks:
        raise ValueError(f"{path}: no chunks")
    return chunks


def chunk_texts(chunks: list[ChunkRow], rows: list[StatementRow]) -> list[str]:
    """Materialize chunk text by joining member statements in order."""
    by_id = {r.statement_id: r for r in rows}
    texts = []
    for ch in chunks:
        missing = [sid for sid in ch.statement_ids if sid not in by_id]
        if missing:
            raise ValueError(
                f"chunk {ch.manifesto_id}/{ch.chunk_index}: statements missing "
                f"from the corpus: {missing[:5]}"
            )
        texts.append(" ".join(by_id[sid].text for sid in ch.statement_ids))
    return texts


def stance_bin_label(score: float) -> str:
    if not -1.0 <= score <= 1.0:
        raise ValueError(f"score {score} outside [-1, 1]")
    for bound, name in zip(_STANCE_BOUNDS, STANCE_BINS):
        if score < bound:
            return name
    return STANCE_BINS[-1]


class LabelMap:
    """Maps gold category codes to classifier labels for a label space.

    The 3-way projection needs the right/left major-code sets, supplied as
    a scale JSON produced by ``scale-bench registry --dump`` (or any file
    with ``right``/``left`` lists).  Scale entries and statement codes are
    rolled up to 3-digit majors: dotted suffixes drop, 4-digit codes drop
    their last digit.
    """

    def __init__(self, labels: tuple[str, ...], code_to_label):
        self.labels = labels
        self._fn = code_to_label

    def label_for(self, code: str) -> str:
        return self._fn(code)

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @staticmethod
    def _major(code: str) -> str:
        if "." in code:
            return code.split(".", 1)[0]
        if len(code) == 4:
            return code[:3]
        return code

    @classmethod
    def rile3(cls, scale_file: str | Path) -> "LabelMap":
        with open(scale_file, encoding="utf-8") as fh:
            raw = json.load(fh)
        try:
            right = {cls._major(str(c)) for c in raw["right"]}
            left = {cls._major(str(c)) for c in raw["left"]}
        except (KeyError, TypeError) as exc:
            raise ValueError(f"{scale_file}: scale file needs right/left lists") from exc

        def project(code: str) -> str:
            major = cls._major(code)
            if major in right:
                return "right"
            if major in left:
                return "left"
            return "other"

        return cls(RILE3_LABELS, project)

    @classmethod
    def cmp(cls, scale_file: str | Path) -> "LabelMap":
        with open(scale_file, encoding="utf-8") as fh:
            raw = json.load(fh)
        cats = raw.get("categories")
        if not cats:
            raise ValueError(f"{scale_file}: no categories list; dump the full registry")
        labels = tuple(sorted(str(c["code"]) for c in cats))
        label_set = set(labels)

        def identity(code: str) -> str:
            if code not in label_set:
                raise ValueError(f"code {code!r} not in the registry dump")
            return code

        return cls(labels, identity)

    @classmethod
    def for_space(cls, space: str, scale_file: str | Path | None) -> "LabelMap":
        if space == "stance5":
            return cls(STANCE_BINS, stance_bin_label)  # type: ignore[arg-type]
        if scale_file is None:
            raise ValueError(f"label space {space!r} needs a scale file "
                             f"(scale-bench registry --dump)")
        if space == "rile3":
            return cls.rile3(scale_file)
        if space == "cmp":
            return cls.cmp(scale_file)
        raise ValueError(f"unknown label space {space!r}")
