"""Label-noise simulation driven by row-stochastic confusion matrices.

Each gold 3-way label is independently resampled from the confusion row of
its true class; manifesto scores recomputed from the perturbed labels are
then compared against gold scores.  This quantifies how much scale quality
survives a given error structure: identity noise preserves it perfectly,
uniform noise destroys it, and realistic off-diagonal structure sits in
between.  A synthetic corpus generator is included because annotated
manifesto data cannot ship with the repository.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus, Manifesto, Statement, build_corpus
from .errors import DataError
from .evaluation import ErrorReport, scale_error_report
from .scales import RILE, RileClass, Scale, RileTally, rile_score

ROW_SUM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class NoiseSpec:
    labels: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]  # rows[i][j] = P(emit labels[j] | true labels[i])
    seed: int
    name: str = "noise"

    def __post_init__(self):
        if len(self.rows) != len(self.labels):
            raise DataError(
                f"noise spec {self.name!r}: {len(self.rows)} rows for "
                f"{len(self.labels)} labels"
            )
        for i, row in enumerate(self.rows):
            if len(row) != len(self.labels):
                raise DataError(f"noise spec {self.name!r}: row {i} has wrong width")
            if any(p < 0 for p in row):
                raise DataError(f"noise spec {self.name!r}: negative entry in row {i}")
            if abs(sum(row) - 1.0) > ROW_SUM_TOLERANCE:
                raise DataError(
                    f"noise spec {self.name!r}: row {i} sums to {sum(row)}, not 1"
                )

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.rows, dtype=float)


def identity_spec(labels: Sequence[str], seed: int) -> NoiseSpec:
    n = len(labels)
    rows = tuple(tuple(1.0 if i == j else 0.0 for j in range(n)) for i in range(n))
    return NoiseSpec(labels=tuple(labels), rows=rows, seed=seed, name="identity")


def uniform_spec(labels: Sequence[str], seed: int) -> NoiseSpec:
    n = len(labels)
    rows = tuple(tuple(1.0 / n for _ in range(n)) for _ in range(n))
    return NoiseSpec(labels=tuple(labels), rows=rows, seed=seed, name="uniform")


def spec_from_counts(labels: Sequence[str], counts: Sequence[Sequence[float]],
                     seed: int, name: str = "counts") -> NoiseSpec:
    """Row-normalize raw confusion counts into emission probabilities."""
    rows = []
    for i, row in enumerate(counts):
        total = float(sum(row))
        if total <= 0:
            raise DataError(f"noise spec {name!r}: row {i} has no mass")
        rows.append(tuple(v / total for v in row))
    return NoiseSpec(labels=tuple(labels), rows=tuple(rows), seed=seed, name=name)


def scale_off_diagonal(spec: NoiseSpec, alpha: float, seed: int | None = None) -> NoiseSpec:
    """Interpolate between the identity (alpha=0) and the spec (alpha=1)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    eye = np.eye(len(spec.labels))
    mixed = eye + alpha * (spec.matrix - eye)
    return NoiseSpec(
        labels=spec.labels,
        rows=tuple(tuple(float(v) for v in row) for row in mixed),
        seed=spec.seed if seed is None else seed,
        name=f"{spec.name}@{alpha}",
    )


def load_noise_spec(path: str | Path, seed: int | None = None) -> NoiseSpec:
    """Read a spec from JSON with keys labels + rows (or raw counts)."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    try:
        labels = [str(x) for x in raw["labels"]]
        name = str(raw.get("name", Path(path).stem))
        file_seed = raw.get("seed", 0)
    except (TypeError, KeyError) as exc:
        raise DataError(f"{path}: not a noise spec: {exc}") from exc
    use_seed = int(file_seed) if seed is None else seed
    if "rows" in raw:
        rows = tuple(tuple(float(v) for v in row) for row in raw["rows"])
        return NoiseSpec(labels=tuple(labels), rows=rows, seed=use_seed, name=name)
    if "counts" in raw:
        return spec_from_counts(labels, raw["counts"], seed=use_seed, name=name)
    raise DataError(f"{path}: noise spec needs 'rows' or 'counts'")


def perturb_labels(gold: Sequence[str], spec: NoiseSpec,
                   rng: np.random.Generator | None = None) -> list[str]:
    """Resample each label independently from its confusion row."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    index = {lab: i for i, lab in enumerate(spec.labels)}
    try:
        rows = np.array([index[g] for g in gold], dtype=np.int64)
    except KeyError as exc:
        raise DataError(f"label {exc.args[0]!r} absent from the noise spec") from exc
    if len(rows) == 0:
        return []
    cum = np.cumsum(spec.matrix, axis=1)
    draws = rng.random(len(rows))
    choice = (draws[:, None] >= cum[rows]).sum(axis=1)
    choice = np.minimum(choice, len(spec.labels) - 1)
    return [spec.labels[int(c)] for c in choice]


# --------------------------------------------------------------------------
# Sweeps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    spec: str
    replicate: int
    report: ErrorReport

    def to_dict(self) -> dict:
        return {"spec": self.spec, "replicate": self.replicate, **self.report.to_dict()}


@dataclass(frozen=True)
class SweepAggregate:
    spec: str
    replicates: int
    mean_r: float
    std_r: float
    mean_mae: float
    mean_error: float
    std_error: float
    mean_dispersion: float

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "replicates": self.replicates,
            "mean_r": self.mean_r,
            "std_r": self.std_r,
            "mean_mae": self.mean_mae,
            "mean_error": self.mean_error,
            "std_error": self.std_error,
            "mean_dispersion": self.mean_dispersion,
        }


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]
    aggregates: tuple[SweepAggregate, ...]


def _score_from_labels(labels: Sequence[str]) -> float:
    r = sum(1 for lab in labels if lab == RileClass.RIGHT.value)
    l = sum(1 for lab in labels if lab == RileClass.LEFT.value)
    return rile_score(RileTally(r, l, len(labels) - r - l))


def noise_sweep(corpus: Corpus, specs: Sequence[NoiseSpec], replicates: int,
                scale: Scale = RILE, dead_zone: float = 0.01,
                jobs: int = 1) -> SweepReport:
    """Perturb gold 3-way labels, rescore manifestos, compare against gold.

    Replicates use independent streams derived from (spec seed, replicate
    index), so the sweep is deterministic and order-independent under
    parallel execution.
    """
    if replicates < 1:
        raise ValueError(f"replicates must be >= 1, got {replicates}")
    mids = sorted(corpus.manifestos)
    gold_classes: list[list[str]] = []
    gold_scores: list[float] = []
    for mid in mids:
        m = corpus.manifestos[mid]
        classes = [scale.classify(s.code).value for s in m.statements]
        gold_classes.append(classes)
        gold_scores.append(_score_from_labels(classes))
    flat_gold = [lab for classes in gold_classes for lab in classes]
    sizes = [len(c) for c in gold_classes]

    def run_one(spec: NoiseSpec, rep: int) -> SweepRow:
        rng = np.random.default_rng([spec.seed, rep])
        noisy = perturb_labels(flat_gold, spec, rng=rng)
        pred_scores = []
        pos = 0
        for size in sizes:
            pred_scores.append(_score_from_labels(noisy[pos : pos + size]))
            pos += size
        report = scale_error_report(gold_scores, pred_scores, dead_zone=dead_zone)
        return SweepRow(spec=spec.name, replicate=rep, report=report)

    tasks = [(spec, rep) for spec in specs for rep in range(replicates)]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda t: run_one(*t), tasks))
    else:
        rows = [run_one(spec, rep) for spec, rep in tasks]

    aggregates = []
    for spec in specs:
        reports = [row.report for row in rows if row.spec == spec.name]
        rs = np.array([rep.spearman_r for rep in reports])
        errs = np.array([rep.mean_error for rep in reports])
        aggregates.append(
            SweepAggregate(
                spec=spec.name,
                replicates=replicates,
                mean_r=float(rs.mean()),
                std_r=float(rs.std(ddof=1)) if len(rs) > 1 else 0.0,
                mean_mae=float(np.mean([rep.mae for rep in reports])),
                mean_error=float(errs.mean()),
                std_error=float(errs.std(ddof=1)) if len(errs) > 1 else 0.0,
                mean_dispersion=float(np.mean([rep.dispersion_ratio for rep in reports])),
            )
        )
    return SweepReport(rows=tuple(rows), aggregates=tuple(aggregates))


# --------------------------------------------------------------------------
# Synthetic corpora
# --------------------------------------------------------------------------

_RIGHT_CODES = ("104", "201.1", "203", "305", "401", "414", "601", "605")
_LEFT_CODES = ("103", "105", "106", "202", "403", "404", "504", "506", "701")
_OTHER_CODES = ("0", "301", "303", "408", "411", "501", "502", "703")

_RIGHT_WORDS = ("order", "security", "enterprise", "tradition", "authority", "defence")
_LEFT_WORDS = ("welfare", "peace", "equality", "labour", "regulation", "education")
_OTHER_WORDS = ("infrastructure", "culture", "environment", "technology", "roads", "tourism")
_FILLER = ("the", "we", "will", "for", "our", "country", "people", "plan", "support")


def gen_synthetic_corpus(
    n_manifestos: int = 200,
    min_statements: int = 100,
    max_statements: int = 200,
    seed: int = 7,
    n_countries: int = 4,
    skew: float = 0.0,
    other_rate: float = 0.5,
    year_range: tuple[int, int] = (2012, 2021),
) -> Corpus:
    """Corpus with manifestos placed on a symmetric grid of latent positions.

    Position theta drives per-statement class probabilities: right and left
    get (1 - other_rate) * (1 +- theta) / 2.  ``skew`` shifts every theta,
    producing imbalanced corpora.  Texts carry class-indicative words so
    the corpus is learnable by the bag-of-words baseline.
    """
    if n_manifestos < 2:
        raise ValueError("need at least 2 manifestos")
    if not 1 <= min_statements <= max_statements:
        raise ValueError("need 1 <= min_statements <= max_statements")
    rng = np.random.default_rng(seed)
    thetas = np.linspace(-0.8, 0.8, n_manifestos) + skew
    thetas = np.clip(thetas, -0.95, 0.95)
    countries = [f"C{i:02d}" for i in range(n_countries)]
    languages = ["aa", "bb", "cc"]

    pools = {
        RileClass.RIGHT: (_RIGHT_CODES, _RIGHT_WORDS),
        RileClass.LEFT: (_LEFT_CODES, _LEFT_WORDS),
        RileClass.OTHER: (_OTHER_CODES, _OTHER_WORDS),
    }
    classes = (RileClass.RIGHT, RileClass.LEFT, RileClass.OTHER)

    manifestos = []
    for i in range(n_manifestos):
        theta = thetas[i]
        p_right = (1 - other_rate) * (1 + theta) / 2
        p_left = (1 - other_rate) * (1 - theta) / 2
        probs = np.array([p_right, p_left, other_rate])
        n_stmts = int(rng.integers(min_statements, max_statements + 1))
        mid = f"m{i:04d}"
        draws = rng.choice(len(classes), size=n_stmts, p=probs)
        statements = []
        for j in range(n_stmts):
            cls = classes[int(draws[j])]
            codes, words = pools[cls]
            code = codes[int(rng.integers(len(codes)))]
            toks = [
                words[int(rng.integers(len(words)))],
                words[int(rng.integers(len(words)))],
                _FILLER[int(rng.integers(len(_FILLER)))],
                _FILLER[int(rng.integers(len(_FILLER)))],
            ]
            statements.append(
                Statement(
                    id=f"{mid}-s{j:04d}",
                    text=" ".join(toks),
                    code=code,
                    manifesto_id=mid,
                    position=j,
                )
            )
        manifestos.append(
            Manifesto(
                id=mid,
                party=f"party-{i % 6}",
                country=countries[i % n_countries],
                language=languages[i % len(languages)],
                year=int(rng.integers(year_range[0], year_range[1] + 1)),
                month=int(rng.integers(1, 13)),
                statements=tuple(statements),
            )
        )
    return build_corpus(manifestos)


def parse_synthetic_uri(uri: str) -> Corpus:
    """Build a corpus from a "synthetic:key=value,..." specifier."""
    if not uri.startswith("synthetic:"):
        raise ValueError(f"not a synthetic corpus uri: {uri!r}")
    kwargs: dict = {}
    body = uri[len("synthetic:"):]
    if body:
        for part in body.split(","):
            if "=" not in part:
                raise DataError(f"bad synthetic corpus parameter {part!r}")
            key, value = part.split("=", 1)
            key = key.strip()
            if key in ("skew", "other_rate"):
                kwargs[key] = float(value)
            elif key == "year_range":
                lo, hi = value.split("-", 1)
                kwargs[key] = (int(lo), int(hi))
            else:
                kwargs[key] = int(value)
    return gen_synthetic_corpus(**kwargs)
