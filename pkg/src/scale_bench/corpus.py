"""Data model and ingestion for category-annotated manifesto corpora.

Canonical interchange format: one JSON object per statement, one per line,
with fields

    statement_id, manifesto_id, party, country, language, year, month,
    position, text, code

A CSV variant uses the same columns with RFC-4180 quoting.  Statements are
grouped into manifestos by ``manifesto_id``; manifesto-level metadata must
agree across all rows of a manifesto.  Corpora are immutable after
construction and safe to share across workers.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, Mapping

from . import scales
from .errors import DataError, SchemaError

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1"

COLUMNS = (
    "statement_id",
    "manifesto_id",
    "party",
    "country",
    "language",
    "year",
    "month",
    "position",
    "text",
    "code",
)

YEAR_RANGE = (1900, 2100)

# Raw code spellings that normalize to the residual category.
_RESIDUAL_ALIASES = {"", "na", "n/a", "nan", "none", "null", "h", "000", "0.0", "0"}


@dataclass(frozen=True)
class Statement:
    id: str
    text: str
    code: str
    manifesto_id: str
    position: int


@dataclass(frozen=True)
class Manifesto:
    id: str
    party: str
    country: str
    language: str
    year: int
    month: int
    statements: tuple[Statement, ...]


@dataclass(frozen=True)
class Provenance:
    source: str
    format: str
    schema_version: str = SCHEMA_VERSION


@dataclass(frozen=True)
class Corpus:
    manifestos: Mapping[str, Manifesto]
    provenance: Provenance | None = field(default=None, compare=False)

    def __iter__(self) -> Iterator[Manifesto]:
        return iter(self.manifestos.values())

    def __len__(self) -> int:
        return len(self.manifestos)

    def statements(self) -> Iterator[Statement]:
        for m in self:
            yield from m.statements

    def countries(self) -> list[str]:
        return sorted({m.country for m in self})


def validate_record(raw_code) -> str:
    """Normalize a raw category code and check it against the registry.

    Heading markers ("H") and blank/NA spellings become the residual "0";
    float export artifacts like "605.0" are stripped to the plain code.
    Anything that does not land on a registered code is an error.
    """
    code = str(raw_code).strip()
    if code.lower() in _RESIDUAL_ALIASES:
        return "0"
    if code.endswith(".0"):
        stripped = code[:-2]
        if scales.is_registered(stripped):
            return stripped
    if not scales.is_registered(code):
        raise DataError(f"category code {raw_code!r} is not in the registry")
    return code


def build_corpus(manifestos: Iterable[Manifesto],
                 provenance: Provenance | None = None) -> Corpus:
    """Assemble a Corpus, enforcing all model invariants."""
    by_id: dict[str, Manifesto] = {}
    seen_statements: set[str] = set()
    for m in manifestos:
        if m.id in by_id:
            raise DataError(f"duplicate manifesto id {m.id!r}")
        if not m.statements:
            raise DataError(f"manifesto {m.id!r} has no statements")
        if not YEAR_RANGE[0] <= m.year <= YEAR_RANGE[1]:
            raise DataError(f"manifesto {m.id!r}: implausible year {m.year}")
        if not 1 <= m.month <= 12:
            raise DataError(f"manifesto {m.id!r}: invalid month {m.month}")
        for want, s in enumerate(m.statements):
            if s.manifesto_id != m.id:
                raise DataError(
                    f"statement {s.id!r} carries manifesto_id {s.manifesto_id!r} "
                    f"inside manifesto {m.id!r}"
                )
            if s.position != want:
                raise DataError(
                    f"manifesto {m.id!r}: positions not dense, expected {want} "
                    f"got {s.position} (statement {s.id!r})"
                )
            if s.id in seen_statements:
                raise DataError(f"duplicate statement id {s.id!r}")
            seen_statements.add(s.id)
        by_id[m.id] = m
    return Corpus(manifestos=by_id, provenance=provenance)


# --------------------------------------------------------------------------
# Parsing
# --------------------------------------------------------------------------


def _rows_from_jsonl(stream: IO[str]):
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON ({exc.msg})", line=lineno) from exc
        if not isinstance(row, dict):
            raise SchemaError("record is not an object", line=lineno)
        yield lineno, row


def _rows_from_csv(stream: IO[str]):
    reader = csv.DictReader(stream)
    if reader.fieldnames is None:
        return
    missing = [c for c in COLUMNS if c not in reader.fieldnames]
    if missing:
        raise SchemaError(f"csv header missing columns: {missing}", line=1)
    for row in reader:
        if not any((v or "").strip() for v in row.values() if v is not None):
            continue
        yield reader.line_num, row


def _parse_row(lineno: int, row: dict) -> tuple[Statement, tuple]:
    missing = [c for c in COLUMNS if c not in row or row[c] is None]
    if missing:
        raise SchemaError(f"missing fields {missing}", line=lineno)
    try:
        year = int(row["year"])
        month = int(row["month"])
        position = int(row["position"])
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"non-integer year/month/position: {exc}", line=lineno) from exc
    text = str(row["text"]).strip()
    if not text:
        raise SchemaError("empty statement text", line=lineno)
    try:
        code = validate_record(row["code"])
    except DataError as exc:
        raise SchemaError(str(exc), line=lineno) from exc
    stmt = Statement(
        id=str(row["statement_id"]),
        text=text,
        code=code,
        manifesto_id=str(row["manifesto_id"]),
        position=position,
    )
    # Manifesto-level metadata rides along for the grouping pass.
    meta = (str(row["party"]), str(row["country"]), str(row["language"]), year, month)
    return stmt, meta


def parse_corpus(source: IO[bytes] | IO[str], fmt: str = "canonical-jsonl",
                 strict: bool = True, source_name: str = "<stream>") -> Corpus:
    """Parse a canonical JSONL or CSV statement stream into a Corpus.

    With ``strict=False`` rows that fail field-level validation are skipped
    with a warning and statement positions are re-densified per manifesto;
    structural problems (duplicate ids, inconsistent manifesto metadata)
    are always errors.
    """
    if fmt not in ("canonical-jsonl", "jsonl", "csv"):
        raise ValueError(f"unknown corpus format {fmt!r}")
    stream: IO[str]
    if isinstance(source, io.TextIOBase):
        stream = source
    elif hasattr(source, "read") and "b" in getattr(source, "mode", "b"):
        stream = io.TextIOWrapper(source, encoding="utf-8")  # type: ignore[arg-type]
    else:
        stream = source  # type: ignore[assignment]

    rows = _rows_from_csv(stream) if fmt == "csv" else _rows_from_jsonl(stream)

    pending: dict[str, list[Statement]] = {}
    metas: dict[str, tuple] = {}
    seen_ids: dict[str, int] = {}
    skipped = 0
    for lineno, row in rows:
        try:
            stmt, meta = _parse_row(lineno, row)
        except SchemaError as exc:
            if strict:
                raise
            skipped += 1
            log.warning("skipping row: %s", exc)
            continue
        if stmt.id in seen_ids:
            raise SchemaError(
                f"duplicate statement id {stmt.id!r} (first seen at line {seen_ids[stmt.id]})",
                line=lineno,
            )
        seen_ids[stmt.id] = lineno
        known = metas.setdefault(stmt.manifesto_id, meta)
        if known != meta:
            raise SchemaError(
                f"manifesto {stmt.manifesto_id!r} metadata disagrees with earlier rows: "
                f"{meta} != {known}",
                line=lineno,
            )
        pending.setdefault(stmt.manifesto_id, []).append(stmt)

    if not pending:
        raise DataError("no records")
    if skipped:
        log.warning("skipped %d malformed rows", skipped)

    manifestos = []
    for mid, stmts in pending.items():
        party, country, language, year, month = metas[mid]
        stmts.sort(key=lambda s: s.position)
        if not strict:
            stmts = [
                Statement(s.id, s.text, s.code, s.manifesto_id, i)
                for i, s in enumerate(stmts)
            ]
        manifestos.append(
            Manifesto(
                id=mid, party=party, country=country, language=language,
                year=year, month=month, statements=tuple(stmts),
            )
        )
    prov = Provenance(source=source_name, format="csv" if fmt == "csv" else "canonical-jsonl")
    return build_corpus(manifestos, provenance=prov)


def load_corpus(path: str | Path, fmt: str | None = None, strict: bool = True) -> Corpus:
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "canonical-jsonl"
    with open(path, encoding="utf-8", newline="" if fmt == "csv" else None) as fh:
        return parse_corpus(fh, fmt=fmt, strict=strict, source_name=str(path))


# --------------------------------------------------------------------------
# Writing
# --------------------------------------------------------------------------


def _statement_rows(corpus: Corpus):
    for mid in sorted(corpus.manifestos):
        m = corpus.manifestos[mid]
        for s in m.statements:
            yield {
                "statement_id": s.id,
                "manifesto_id": m.id,
                "party": m.party,
                "country": m.country,
                "language": m.language,
                "year": m.year,
                "month": m.month,
                "position": s.position,
                "text": s.text,
                "code": s.code,
            }


def write_corpus(corpus: Corpus, dest: IO[str] | str | Path,
                 fmt: str = "canonical-jsonl") -> None:
    if fmt not in ("canonical-jsonl", "jsonl", "csv"):
        raise ValueError(f"unknown corpus format {fmt!r}")
    if isinstance(dest, (str, Path)):
        with open(dest, "w", encoding="utf-8", newline="" if fmt == "csv" else None) as fh:
            write_corpus(corpus, fh, fmt=fmt)
        return
    if fmt == "csv":
        writer = csv.DictWriter(dest, fieldnames=COLUMNS)
        writer.writeheader()
        for row in _statement_rows(corpus):
            writer.writerow(row)
    else:
        for row in _statement_rows(corpus):
            dest.write(json.dumps(row, ensure_ascii=False) + "\n")


# --------------------------------------------------------------------------
# Statistics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class GroupCount:
    manifestos: int
    statements: int


@dataclass(frozen=True)
class CorpusStats:
    by_country: Mapping[str, GroupCount]
    by_language: Mapping[str, GroupCount]
    total_manifestos: int
    total_statements: int

    def to_dict(self) -> dict:
        return {
            "total_manifestos": self.total_manifestos,
            "total_statements": self.total_statements,
            "by_country": {
                k: {"manifestos": v.manifestos, "statements": v.statements}
                for k, v in sorted(self.by_country.items())
            },
            "by_language": {
                k: {"manifestos": v.manifestos, "statements": v.statements}
                for k, v in sorted(self.by_language.items())
            },
        }


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Manifesto and statement counts per country and per language."""
    country_m: dict[str, int] = {}
    country_s: dict[str, int] = {}
    language_m: dict[str, int] = {}
    language_s: dict[str, int] = {}
    total_s = 0
    for m in corpus:
        n = len(m.statements)
        total_s += n
        country_m[m.country] = country_m.get(m.country, 0) + 1
        country_s[m.country] = country_s.get(m.country, 0) + n
        language_m[m.language] = language_m.get(m.language, 0) + 1
        language_s[m.language] = language_s.get(m.language, 0) + n
    return CorpusStats(
        by_country={c: GroupCount(country_m[c], country_s[c]) for c in country_m},
        by_language={l: GroupCount(language_m[l], language_s[l]) for l in language_m},
        total_manifestos=len(corpus),
        total_statements=total_s,
    )
