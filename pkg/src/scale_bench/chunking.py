"""Fixed-token-budget chunks over consecutive statements.

Chunks are built greedily left to right: statements are appended while the
running token count stays within the budget; the chunk closes at overflow
and a new one starts.  Chunks below the minimum size are dropped wherever
they occur, and a lone statement that alone exceeds the budget becomes its
own chunk flagged ``oversized``.  Each emitted chunk carries a scale score
computed from its statements' gold codes, so chunk files double as training
data for long-input regression models.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable, Iterable, Mapping, Sequence

from .corpus import Corpus, Manifesto
from .errors import DataError, SchemaError
from .scales import RILE, Scale, StanceBin, rile_score, stance_bin, tally_classes

DEFAULT_MAX_TOKENS = 4095
DEFAULT_MIN_TOKENS = 1000


def count_whitespace_tokens(text: str) -> int:
    """Default token counter: Unicode-whitespace word count."""
    return len(text.split())


@dataclass(frozen=True)
class Chunk:
    manifesto_id: str
    index: int
    statement_ids: tuple[str, ...]
    token_count: int
    gold_score: float
    oversized: bool = False


def build_chunks(
    manifesto: Manifesto,
    counter: Callable[[str], int] = count_whitespace_tokens,
    max_tokens: int = DEFAULT_MAX_TOKENS,
    min_tokens: int = DEFAULT_MIN_TOKENS,
    token_counts: Mapping[str, int] | None = None,
    scale: Scale = RILE,
) -> list[Chunk]:
    """Greedy packing of a manifesto's statements into token-budget chunks.

    ``token_counts`` overrides the counter with precomputed per-statement
    counts keyed by statement id (e.g. model-true subword counts).  Emitted
    chunks are indexed densely in order; an empty result is valid.
    """
    if not max_tokens > min_tokens > 0:
        raise ValueError(f"need max_tokens > min_tokens > 0, got {max_tokens}/{min_tokens}")

    counts = []
    for s in manifesto.statements:
        if token_counts is not None:
            try:
                c = int(token_counts[s.id])
            except KeyError:
                raise DataError(f"no token count for statement {s.id!r}") from None
        else:
            c = int(counter(s.text))
        if c < 0:
            raise ValueError(f"negative token count {c} for statement {s.id!r}")
        counts.append(c)

    groups: list[tuple[list, int, bool]] = []
    current: list = []
    current_count = 0
    for s, c in zip(manifesto.statements, counts):
        if c > max_tokens:
            if current:
                groups.append((current, current_count, False))
                current, current_count = [], 0
            groups.append(([s], c, True))
        elif current_count + c <= max_tokens:
            current.append(s)
            current_count += c
        else:
            groups.append((current, current_count, False))
            current, current_count = [s], c
    if current:
        groups.append((current, current_count, False))

    chunks = []
    for stmts, count, oversized in groups:
        if count < min_tokens:
            continue
        score = rile_score(tally_classes(scale.classify(s.code) for s in stmts))
        chunks.append(
            Chunk(
                manifesto_id=manifesto.id,
                index=len(chunks),
                statement_ids=tuple(s.id for s in stmts),
                token_count=count,
                gold_score=score,
                oversized=oversized,
            )
        )
    return chunks


def chunk_corpus(corpus: Corpus, **kwargs) -> dict[str, list[Chunk]]:
    """build_chunks over every manifesto, keyed by manifesto id."""
    return {m.id: build_chunks(m, **kwargs) for m in corpus}


def chunk_gold_score(chunk: Chunk, manifesto: Manifesto, scale: Scale = RILE) -> float:
    """Score of a chunk recomputed from the manifesto's gold codes."""
    by_id = {s.id: s for s in manifesto.statements}
    missing = [sid for sid in chunk.statement_ids if sid not in by_id]
    if missing:
        raise DataError(
            f"chunk {chunk.manifesto_id}/{chunk.index}: dangling statement ids {missing[:5]}"
        )
    return rile_score(
        tally_classes(scale.classify(by_id[sid].code) for sid in chunk.statement_ids)
    )


def average_chunk_scores(scores: Sequence[float]) -> float:
    if not scores:
        raise DataError("manifesto yielded no chunks")
    return sum(scores) / len(scores)


def majority_stance(bins: Sequence[StanceBin], tie_break: str = "centrist") -> StanceBin:
    """Most frequent stance bin.

    Ties go to the bin closer to the centrist bin; between equidistant bins
    the left one wins.  ``tie_break`` may instead be "left" or "right" to
    pick the outermost tied bin on that side.
    """
    if not bins:
        raise DataError("no stance bins to aggregate")
    if tie_break not in ("centrist", "left", "right"):
        raise ValueError(f"unknown tie_break {tie_break!r}")
    counts: dict[StanceBin, int] = {}
    for b in bins:
        counts[b] = counts.get(b, 0) + 1
    best = max(counts.values())
    tied = [b for b, n in counts.items() if n == best]
    if tie_break == "centrist":
        return min(tied, key=lambda b: (b.centre_distance, b.position))
    if tie_break == "left":
        return min(tied, key=lambda b: b.position)
    return max(tied, key=lambda b: b.position)


def manifesto_stance_from_chunks(chunks: Sequence[Chunk],
                                 tie_break: str = "centrist") -> StanceBin:
    return majority_stance([stance_bin(c.gold_score) for c in chunks], tie_break)


# --------------------------------------------------------------------------
# Chunk file IO: {manifesto_id, chunk_index, statement_ids, token_count,
#                 gold_rile, oversized}
# --------------------------------------------------------------------------


def write_chunks(chunks: Iterable[Chunk], dest: IO[str] | str | Path) -> None:
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8") as fh:
            write_chunks(chunks, fh)
        return
    for ch in chunks:
        dest.write(
            json.dumps(
                {
                    "manifesto_id": ch.manifesto_id,
                    "chunk_index": ch.index,
                    "statement_ids": list(ch.statement_ids),
                    "token_count": ch.token_count,
                    "gold_rile": ch.gold_score,
                    "oversized": ch.oversized,
                },
                ensure_ascii=False,
            )
            + "\n"
        )


def read_chunks(path: str | Path) -> list[Chunk]:
    chunks = []
    seen: set[tuple[str, int]] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                chunk = Chunk(
                    manifesto_id=str(row["manifesto_id"]),
                    index=int(row["chunk_index"]),
                    statement_ids=tuple(str(s) for s in row["statement_ids"]),
                    token_count=int(row["token_count"]),
                    gold_score=float(row["gold_rile"]),
                    oversized=bool(row["oversized"]),
                )
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise SchemaError(f"bad chunk record: {exc}", line=lineno) from exc
            key = (chunk.manifesto_id, chunk.index)
            if key in seen:
                raise SchemaError(f"duplicate chunk {key}", line=lineno)
            seen.add(key)
            chunks.append(chunk)
    return chunks


def proxy_scores(corpus: Corpus, **kwargs) -> tuple[list[float], list[float]]:
    """Per-manifesto (gold score, averaged chunk gold score) pairs.

    Manifestos that yield no chunks are skipped.  Used to check how well
    chunk averages track manifesto-level scores.
    """
    from .scales import manifesto_rile

    scale = kwargs.get("scale", RILE)
    gold, proxy = [], []
    for m in corpus:
        chunks = build_chunks(m, **kwargs)
        if not chunks:
            continue
        gold.append(manifesto_rile(m, scale=scale))
        proxy.append(average_chunk_scores([c.gold_score for c in chunks]))
    return gold, proxy
