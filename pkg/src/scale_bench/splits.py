"""Experiment partitions: leave-one-country-out folds and the temporal split.

Splits operate at manifesto granularity only, so statements of the same
manifesto can never leak across the train/test boundary.  Every generated
fold is mechanically checked for disjointness, corpus coverage, and
held-out-country purity before it is returned.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping

import numpy as np

from .corpus import Corpus
from .errors import DataError


@dataclass(frozen=True)
class SplitSpec:
    name: str
    train: frozenset[str]
    dev: frozenset[str]
    test: frozenset[str]
    metadata: Mapping[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "train": sorted(self.train),
            "dev": sorted(self.dev),
            "test": sorted(self.test),
            "metadata": dict(self.metadata),
        }


def check_split(spec: SplitSpec, corpus: Corpus) -> None:
    """Raise unless the split satisfies all structural invariants."""
    if spec.train & spec.dev or spec.train & spec.test or spec.dev & spec.test:
        raise DataError(f"split {spec.name!r}: train/dev/test overlap")
    if not spec.test:
        raise DataError(f"split {spec.name!r}: empty test set")
    all_ids = set(corpus.manifestos)
    extra = (spec.train | spec.dev | spec.test) - all_ids
    if extra:
        raise DataError(f"split {spec.name!r}: unknown manifesto ids {sorted(extra)[:5]}")
    held_out = spec.metadata.get("held_out_country")
    if held_out is not None:
        for mid in spec.train | spec.dev:
            if corpus.manifestos[mid].country == held_out:
                raise DataError(
                    f"split {spec.name!r}: manifesto {mid!r} from held-out country "
                    f"{held_out!r} leaked into train/dev"
                )


def leave_one_country_out(corpus: Corpus) -> list[SplitSpec]:
    """One fold per country: that country's manifestos are the test set."""
    countries = corpus.countries()
    if len(countries) < 2:
        raise DataError(f"need >= 2 countries for leave-one-country-out, got {len(countries)}")
    by_country: dict[str, set[str]] = {c: set() for c in countries}
    for m in corpus:
        by_country[m.country].add(m.id)
    folds = []
    for country in countries:
        test = frozenset(by_country[country])
        train = frozenset(set(corpus.manifestos) - test)
        spec = SplitSpec(
            name=f"xcountry-{country}",
            train=train,
            dev=frozenset(),
            test=test,
            metadata={"held_out_country": country},
        )
        check_split(spec, corpus)
        folds.append(spec)
    return folds


def temporal_split(corpus: Corpus, cutoff_year: int = 2019,
                   end_year: int = 2021) -> SplitSpec:
    """Train on manifestos before the cutoff, test on [cutoff, end].

    Manifestos dated after ``end_year`` belong to neither side.
    """
    train, test = set(), set()
    for m in corpus:
        if m.year < cutoff_year:
            train.add(m.id)
        elif m.year <= end_year:
            test.add(m.id)
    if not train:
        raise DataError(f"no manifestos before {cutoff_year}")
    if not test:
        raise DataError(f"no manifestos in [{cutoff_year}, {end_year}]")
    spec = SplitSpec(
        name=f"xtime-{cutoff_year}",
        train=frozenset(train),
        dev=frozenset(),
        test=frozenset(test),
        metadata={"cutoff_year": cutoff_year, "end_year": end_year},
    )
    check_split(spec, corpus)
    return spec


def carve_dev(spec: SplitSpec, corpus: Corpus, fraction: float = 0.1,
              seed: int = 0) -> SplitSpec:
    """Move a deterministic, country-stratified sample of train into dev.

    Country quotas follow the largest-remainder method so the global dev
    size is round(fraction * |train|).  The same (spec, fraction, seed)
    always yields the same dev set.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"dev fraction must be in (0, 1), got {fraction}")
    train_ids = sorted(spec.train)
    target = round(fraction * len(train_ids))
    if target < 1:
        raise DataError(
            f"split {spec.name!r}: train set of {len(train_ids)} yields an empty dev "
            f"at fraction {fraction}"
        )
    groups: dict[str, list[str]] = {}
    for mid in train_ids:
        groups.setdefault(corpus.manifestos[mid].country, []).append(mid)

    quotas = {c: math.floor(fraction * len(ids)) for c, ids in groups.items()}
    remainders = sorted(
        groups,
        key=lambda c: (fraction * len(groups[c]) - quotas[c], c),
        reverse=True,
    )
    i = 0
    while sum(quotas.values()) < target:
        quotas[remainders[i % len(remainders)]] += 1
        i += 1

    rng = np.random.default_rng(seed)
    dev: set[str] = set()
    for country in sorted(groups):
        ids = groups[country]
        k = min(quotas[country], len(ids))
        if k:
            dev.update(rng.choice(ids, size=k, replace=False).tolist())

    new = replace(
        spec,
        train=frozenset(set(train_ids) - dev),
        dev=frozenset(dev),
        metadata={**spec.metadata, "dev_fraction": fraction, "dev_seed": seed},
    )
    check_split(new, corpus)
    return new


def write_split(spec: SplitSpec, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(spec.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_split(path: str | Path) -> SplitSpec:
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        return SplitSpec(
            name=str(raw["name"]),
            train=frozenset(str(x) for x in raw["train"]),
            dev=frozenset(str(x) for x in raw["dev"]),
            test=frozenset(str(x) for x in raw["test"]),
            metadata=dict(raw.get("metadata", {})),
        )
    except (TypeError, KeyError) as exc:
        raise DataError(f"{path}: not a split file: {exc}") from exc
