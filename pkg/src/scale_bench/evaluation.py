"""Metrics: rank correlation, classification scores, and scale-error diagnostics.

Rank correlation uses average ranks for ties.  The scale-error report
captures the diagnostics used to characterize predicted score quality:
absolute and signed errors, sign flips by scatterplot quadrant (with a dead
zone so near-zero gold scores do not register as flips), the ratio of
predicted to gold dispersion, and the skewness of the error distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .errors import DataError, NumericError
from .scales import RILE, RileClass, Scale, major_code


def average_ranks(values: Sequence[float]) -> np.ndarray:
    """1-based ranks; tied values receive the mean of their rank range."""
    arr = np.asarray(values, dtype=float)
    order = np.argsort(arr, kind="stable")
    ranks = np.empty(len(arr), dtype=float)
    i = 0
    while i < len(arr):
        j = i
        while j + 1 < len(arr) and arr[order[j + 1]] == arr[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2 + 1
        i = j + 1
    return ranks


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks."""
    if len(xs) != len(ys):
        raise DataError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 2:
        raise DataError(f"need >= 2 observations, got {len(xs)}")
    rx = average_ranks(xs)
    ry = average_ranks(ys)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    nx = float(np.sqrt((dx * dx).sum()))
    ny = float(np.sqrt((dy * dy).sum()))
    if nx == 0.0 or ny == 0.0:
        raise NumericError("undefined correlation: constant input")
    # Equal / exactly reversed rank vectors are +-1 by definition; keep them
    # exact instead of within rounding of the normalization.
    if np.array_equal(rx, ry):
        return 1.0
    if np.array_equal(rx, len(rx) + 1 - ry):
        return -1.0
    return float((dx * dy).sum() / (nx * ny))


# --------------------------------------------------------------------------
# Classification metrics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricsReport:
    accuracy: float
    weighted_f1: float
    per_label_f1: Mapping[str, float]
    support: Mapping[str, int]

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "weighted_f1": self.weighted_f1,
            "per_label_f1": {k: self.per_label_f1[k] for k in sorted(self.per_label_f1)},
            "support": {k: self.support[k] for k in sorted(self.support)},
        }


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with true labels in the rows, predicted labels in the columns."""

    labels: tuple[str, ...]
    counts: np.ndarray

    def row_normalized(self) -> np.ndarray:
        totals = self.counts.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(totals > 0, self.counts / totals, 0.0)
        return out

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "counts": self.counts.astype(int).tolist(),
        }


def confusion(gold: Sequence[str], pred: Sequence[str],
              labels: Sequence[str]) -> ConfusionMatrix:
    if len(gold) != len(pred):
        raise DataError(f"length mismatch: {len(gold)} vs {len(pred)}")
    index = {lab: i for i, lab in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for g, p in zip(gold, pred):
        try:
            counts[index[g], index[p]] += 1
        except KeyError as exc:
            raise DataError(f"label {exc.args[0]!r} outside the label space") from exc
    return ConfusionMatrix(labels=tuple(labels), counts=counts)


def metrics_from_confusion(cm: ConfusionMatrix) -> MetricsReport:
    """Accuracy and class-weighted F1 recomputed from a confusion matrix."""
    counts = cm.counts.astype(float)
    total = counts.sum()
    if total == 0:
        raise DataError("empty confusion matrix")
    tp = np.diag(counts)
    support = counts.sum(axis=1)
    predicted = counts.sum(axis=0)
    per_label = {}
    weighted = 0.0
    for i, lab in enumerate(cm.labels):
        prec = tp[i] / predicted[i] if predicted[i] > 0 else 0.0
        rec = tp[i] / support[i] if support[i] > 0 else 0.0
        f1 = 2 * prec * rec / (prec + rec) if prec + rec > 0 else 0.0
        per_label[lab] = float(f1)
        weighted += (support[i] / total) * f1
    return MetricsReport(
        accuracy=float(tp.sum() / total),
        weighted_f1=float(weighted),
        per_label_f1=per_label,
        support={lab: int(support[i]) for i, lab in enumerate(cm.labels)},
    )


def classification_metrics(gold: Sequence[str], pred: Sequence[str],
                           space) -> MetricsReport:
    """Exact-match accuracy plus F1 per label, weighted by gold support.

    ``space`` is the label list (or anything with a ``.labels`` attribute);
    labels absent from gold contribute zero weight.
    """
    labels = tuple(getattr(space, "labels", space))
    if len(gold) == 0:
        raise DataError("no observations")
    return metrics_from_confusion(confusion(gold, pred, labels))


# --------------------------------------------------------------------------
# Scale error diagnostics
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ErrorReport:
    spearman_r: float
    mae: float
    mean_error: float
    ul_flips: int
    lr_flips: int
    dispersion_ratio: float
    error_skew: float
    n: int

    def to_dict(self) -> dict:
        return {
            "spearman_r": self.spearman_r,
            "mae": self.mae,
            "mean_error": self.mean_error,
            "sign_flips": {"UL": self.ul_flips, "LR": self.lr_flips},
            "dispersion_ratio": self.dispersion_ratio,
            "error_skew": self.error_skew,
            "n": self.n,
        }


def _sample_skew(errors: np.ndarray) -> float:
    # Adjusted Fisher-Pearson estimator; 0.0 when undefined (n < 3 or
    # zero variance).
    n = len(errors)
    if n < 3:
        return 0.0
    centered = errors - errors.mean()
    m2 = float((centered**2).mean())
    if m2 == 0.0:
        return 0.0
    m3 = float((centered**3).mean())
    g1 = m3 / m2**1.5
    return float(g1 * np.sqrt(n * (n - 1)) / (n - 2))


def scale_error_report(gold_scores: Sequence[float], pred_scores: Sequence[float],
                       dead_zone: float = 0.01) -> ErrorReport:
    """Error diagnostics for predicted vs gold scale scores.

    Sign flips are counted per scatterplot quadrant (gold on x, predictions
    on y): UL means gold < -dead_zone with positive prediction, LR gold >
    dead_zone with negative prediction.
    """
    if len(gold_scores) != len(pred_scores):
        raise DataError(f"length mismatch: {len(gold_scores)} vs {len(pred_scores)}")
    gold = np.asarray(gold_scores, dtype=float)
    pred = np.asarray(pred_scores, dtype=float)
    errors = pred - gold
    ul = int(np.sum((gold < -dead_zone) & (pred > 0)))
    lr = int(np.sum((gold > dead_zone) & (pred < 0)))
    return ErrorReport(
        spearman_r=spearman(gold, pred),
        mae=float(np.abs(errors).mean()),
        mean_error=float(errors.mean()),
        ul_flips=ul,
        lr_flips=lr,
        dispersion_ratio=float(pred.std(ddof=1) / gold.std(ddof=1)),
        error_skew=_sample_skew(errors),
        n=len(gold),
    )


# --------------------------------------------------------------------------
# Per-country label-share profiles
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class CountryProfile:
    country: str
    statements: int
    major_shares: Mapping[str, float]
    class_share: float

    def to_dict(self) -> dict:
        return {
            "country": self.country,
            "statements": self.statements,
            "major_shares": {k: self.major_shares[k] for k in sorted(self.major_shares)},
            "class_share": self.class_share,
        }


def category_share_profile(corpus: Corpus, cls: RileClass,
                           scale: Scale = RILE) -> dict[str, CountryProfile]:
    """Per-country distribution over major codes plus the cumulative share
    of statements whose major falls in ``cls``."""
    counts: dict[str, dict[str, int]] = {}
    totals: dict[str, int] = {}
    for m in corpus:
        c = counts.setdefault(m.country, {})
        for s in m.statements:
            major = major_code(s.code)
            c[major] = c.get(major, 0) + 1
            totals[m.country] = totals.get(m.country, 0) + 1
    profiles = {}
    for country in sorted(counts):
        total = totals[country]
        shares = {maj: n / total for maj, n in counts[country].items()}
        cumulative = sum(
            share for maj, share in shares.items() if scale.classify(maj) is cls
        )
        profiles[country] = CountryProfile(
            country=country,
            statements=total,
            major_shares=shares,
            class_share=cumulative,
        )
    return profiles
