"""Machine translation of a corpus into English.

translate_corpus keeps statement ids, positions, and codes untouched,
passes English rows through unchanged, and skips (with a warning and a
listing) manifestos whose language the translator does not support.  The
production backend loads per-language Opus-MT Marian checkpoints on demand;
any object satisfying the Translator protocol can stand in, which is how
tests run without model downloads.
"""

from __future__ import annotations

import json
import logging
from dataclasses import replace
from pathlib import Path
from typing import Protocol

from .data import StatementRow

log = logging.getLogger(__name__)


class Translator(Protocol):
    def supports(self, language: str) -> bool: ...

    def translate_batch(self, texts: list[str], language: str) -> list[str]: ...


class MarianTranslator:
    """Opus-MT backend: one Marian model per source language, lazily loaded.

    Model names follow the Helsinki-NLP/opus-mt-{src}-en convention.
    Loading is best-effort: languages whose checkpoint cannot be fetched
    are reported as unsupported.
    """

    def __init__(self, batch_size: int = 16, max_length: int = 512):
        self.batch_size = batch_size
        self.max_length = max_length
        self._models: dict[str, tuple] = {}
        self._failed: set[str] = set()

    def _load(self, language: str):
        if language in self._models:
            return self._models[language]
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        name = f"Helsinki-NLP/opus-mt-{language}-en"
        try:
            tokenizer = AutoTokenizer.from_pretrained(name)
            model = AutoModelForSeq2SeqLM.from_pretrained(name)
        except (OSError, ValueError) as exc:
            log.warning("no translation model for %r (%s): %s", language, name, exc)
            self._failed.add(language)
            raise KeyError(language) from exc
        model.eval()
        self._models[language] = (tokenizer, model)
        return tokenizer, model

    def supports(self, language: str) -> bool:
        if language in self._failed:
            return False
        try:
            self._load(language)
            return True
        except KeyError:
            return False

    def translate_batch(self, texts: list[str], language: str) -> list[str]:
        import torch

        tokenizer, model = self._load(language)
        out: list[str] = []
        for start in range(0, len(texts), self.batch_size):
            batch = texts[start : start + self.batch_size]
            encoded = tokenizer(batch, return_tensors="pt", padding=True,
                                truncation=True, max_length=self.max_length)
            with torch.no_grad():
                generated = model.generate(**encoded, max_length=self.max_length)
            out.extend(tokenizer.batch_decode(generated, skip_special_tokens=True))
        return out


def translate_corpus(
    rows: list[StatementRow],
    translator: Translator,
    batch_size: int = 64,
) -> tuple[list[StatementRow], dict[str, int]]:
    """Translate every non-English row; returns (rows, skipped-per-language).

    Output rows carry language "en"; skipped manifestos are dropped whole.
    """
    by_language: dict[str, list[StatementRow]] = {}
    for row in rows:
        by_language.setdefault(row.language, []).append(row)

    out: list[StatementRow] = []
    skipped: dict[str, int] = {}
    for language in sorted(by_language):
        group = by_language[language]
        if language == "en":
            out.extend(group)
            continue
        if not translator.supports(language):
            skipped[language] = len(group)
            continue
        for start in range(0, len(group), batch_size):
            batch = group[start : start + batch_size]
            translations = translator.translate_batch([r.text for r in batch], language)
            if len(translations) != len(batch):
                raise ValueError(
                    f"translator returned {len(translations)} texts for "
                    f"{len(batch)} inputs ({language})"
                )
            out.extend(
                replace(row, text=text, language="en")
                for row, text in zip(batch, translations)
            )
    if skipped:
        log.warning("skipped untranslatable languages: %s",
                    ", ".join(f"{k} ({v} statements)" for k, v in sorted(skipped.items())))
    out.sort(key=lambda r: (r.manifesto_id, r.position))
    return out, skipped


def write_corpus_rows(rows: list[StatementRow], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in rows:
            fh.write(json.dumps({
                "statement_id": r.statement_id,
                "manifesto_id": r.manifesto_id,
                "party": r.party,
                "country": r.country,
                "language": r.language,
                "year": r.year,
                "month": r.month,
                "position": r.position,
                "text": r.text,
                "code": r.code,
            }, ensure_ascii=False) + "\n")
