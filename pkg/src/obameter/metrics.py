"""Outcome metrics and statistics.

TTK (trained-to-landing keyword overlap) and BAiLP (behaviourally matched
ad share) quantify how strongly surviving ads reflect the training:

    ttk   = |K_T intersect K_L| / |K_T|
    bailp = sum(ntimes over impressions whose landing page shares at least
            one training keyword) / sum(ntimes over all impressions)

Both work on unique normalized keyword sets and exact string overlap; the
taxonomy plays no role here. Detection performance weighs every displayed
ad (ntimes), not just distinct landing pages, so a frequently repeated ad
counts as often as it was shown.

Correlation against ad prices removes CPC outliers outside
[Q1 - 1.5 IQR, Q3 + 1.5 IQR] first. Quartiles use the median-exclusive
convention by default; pass method="inclusive" for the other one. The
Pearson p-value uses the t approximation, the Spearman p-value the
large-sample normal approximation; both are reported, never gated on.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from scipy import stats as _scipy_stats

from .corpus import AdImpression
from .errors import (
    DegenerateSeries,
    EmptyTrainingSet,
    KeyMismatch,
    MissingGroundTruth,
    NoImpressions,
)
from .taxonomy import normalize_keyword

POSITIVE_LABEL = "oba"


def _normset(keywords: Iterable[str]) -> set[str]:
    out = {normalize_keyword(k) for k in keywords}
    out.discard("")
    return out


def ttk(training_keywords: Iterable[str], landing_keywords: Iterable[str]) -> float:
    """Fraction of training keywords that reappear across landing pages."""
    k_t = _normset(training_keywords)
    if not k_t:
        raise EmptyTrainingSet("TTK needs a non-empty training keyword set")
    k_l = _normset(landing_keywords)
    return len(k_t & k_l) / len(k_t)


def bailp(
    training_keywords: Iterable[str],
    landing_records: Iterable[tuple[Iterable[str], int]],
) -> float:
    """ntimes-weighted share of impressions with a training-keyword match.

    landing_records pairs each landing page's keyword set with its ntimes
    count. Raises NoImpressions when the records are empty (zero total).
    """
    k_t = _normset(training_keywords)
    matched = 0
    total = 0
    for keywords, ntimes in landing_records:
        total += ntimes
        if k_t & _normset(keywords):
            matched += ntimes
    if total <= 0:
        raise NoImpressions("BAiLP needs at least one impression")
    return matched / total


@dataclass
class PerformanceReport:
    """Confusion counts (ntimes-weighted) and the derived rates.

    A rate whose denominator is zero is None, never a fake zero.
    """

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def recall(self) -> float | None:
        return self.tp / (self.tp + self.fn) if (self.tp + self.fn) else None

    @property
    def accuracy(self) -> float | None:
        total = self.tp + self.fp + self.tn + self.fn
        return (self.tp + self.tn) / total if total else None

    @property
    def fpr(self) -> float | None:
        return self.fp / (self.fp + self.tn) if (self.fp + self.tn) else None

    @property
    def fnr(self) -> float | None:
        return self.fn / (self.fn + self.tp) if (self.fn + self.tp) else None

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "recall": self.recall, "accuracy": self.accuracy,
            "fpr": self.fpr, "fnr": self.fnr,
        }


def detection_performance(
    impressions: Iterable[AdImpression],
    predicted_keys: set,
) -> PerformanceReport:
    """Score predicted-OBA membership against ground-truth labels.

    predicted_keys holds AdImpression.key values the tool classified as
    OBA (survived every filter and shares a training keyword). Raises
    MissingGroundTruth on any unlabeled impression.
    """
    tp = fp = tn = fn = 0
    for imp in impressions:
        if imp.ground_truth is None:
            raise MissingGroundTruth(
                f"impression {imp.key} has no ground-truth label"
            )
        is_oba = imp.ground_truth == POSITIVE_LABEL
        predicted = imp.key in predicted_keys
        if is_oba and predicted:
            tp += imp.ntimes
        elif is_oba:
            fn += imp.ntimes
        elif predicted:
            fp += imp.ntimes
        else:
            tn += imp.ntimes
    return PerformanceReport(tp=tp, fp=fp, tn=tn, fn=fn)


# ---------------------------------------------------------------------------
# order statistics


def quartiles(values: Sequence[float], method: str = "exclusive") -> tuple[float, float, float]:
    """(Q1, median, Q3) with the chosen half-splitting convention.

    "exclusive" leaves the median out of both halves when n is odd;
    "inclusive" puts it in both. With fewer than 3 values the quartiles
    collapse toward the median.
    """
    if method not in ("exclusive", "inclusive"):
        raise ValueError(f"unknown quartile method {method!r}")
    data = sorted(values)
    n = len(data)
    if n == 0:
        raise DegenerateSeries("quartiles of an empty series")
    med = statistics.median(data)
    if n == 1:
        return data[0], med, data[0]
    half = n // 2
    if method == "exclusive":
        lower = data[:half]
        upper = data[n - half:]
    else:
        cut = half + (n % 2)
        lower = data[:cut]
        upper = data[n - cut:]
    return statistics.median(lower), med, statistics.median(upper)


def iqr_bounds(values: Sequence[float], method: str = "exclusive") -> tuple[float, float]:
    """Tukey fences [Q1 - 1.5 IQR, Q3 + 1.5 IQR]."""
    q1, _, q3 = quartiles(values, method)
    iqr = q3 - q1
    return q1 - 1.5 * iqr, q3 + 1.5 * iqr


@dataclass
class CorrelationReport:
    spearman: float
    spearman_p: float
    pearson: float
    pearson_p: float
    n_used: int
    removed_keys: list

    def to_dict(self) -> dict:
        return {
            "spearman": self.spearman, "spearman_p": self.spearman_p,
            "pearson": self.pearson, "pearson_p": self.pearson_p,
            "n_used": self.n_used, "removed_keys": list(self.removed_keys),
        }


def value_correlation(
    bailp_by_key: Mapping,
    cpc_by_key: Mapping,
    method: str = "exclusive",
) -> CorrelationReport:
    """Spearman and Pearson between BAiLP and ad price, outliers removed.

    Pairs align by key. CPC values outside the Tukey fences drop out
    before anything is computed. Raises KeyMismatch for differing key
    sets and DegenerateSeries when fewer than 3 pairs remain or either
    surviving series is constant.
    """
    if set(bailp_by_key) != set(cpc_by_key):
        raise KeyMismatch(
            f"series keys differ: {sorted(set(bailp_by_key) ^ set(cpc_by_key))!r}"
        )
    keys = sorted(bailp_by_key)
    if not keys:
        raise DegenerateSeries("correlation of empty series")
    lo, hi = iqr_bounds([cpc_by_key[k] for k in keys], method)
    used = [k for k in keys if lo <= cpc_by_key[k] <= hi]
    removed = [k for k in keys if k not in set(used)]
    if len(used) < 3:
        raise DegenerateSeries(
            f"only {len(used)} pairs left after outlier removal, need 3"
        )
    xs = [bailp_by_key[k] for k in used]
    ys = [cpc_by_key[k] for k in used]
    if len(set(xs)) == 1 or len(set(ys)) == 1:
        raise DegenerateSeries("constant series has no defined correlation")

    pearson = float(_scipy_stats.pearsonr(xs, ys).statistic)
    spearman = float(_scipy_stats.spearmanr(xs, ys).statistic)
    n = len(used)
    pearson_p = _pearson_p_t_approx(pearson, n)
    spearman_p = _spearman_p_normal_approx(spearman, n)
    return CorrelationReport(
        spearman=spearman, spearman_p=spearman_p,
        pearson=pearson, pearson_p=pearson_p,
        n_used=n, removed_keys=removed,
    )


def _pearson_p_t_approx(r: float, n: int) -> float:
    """Two-sided p via the t distribution with n - 2 degrees of freedom."""
    if n <= 2:
        return 1.0
    denom = 1.0 - r * r
    if denom <= 0.0:
        return 0.0
    t = abs(r) * math.sqrt((n - 2) / denom)
    return float(2.0 * _scipy_stats.t.sf(t, df=n - 2))


def _spearman_p_normal_approx(rho: float, n: int) -> float:
    """Two-sided p via z = rho * sqrt(n - 1), the large-sample normal."""
    z = abs(rho) * math.sqrt(n - 1)
    return math.erfc(z / math.sqrt(2.0))


@dataclass
class ComparisonStats:
    """Five-number summary of per-key differences a - b (boxplot food)."""

    n: int
    mean: float
    median: float
    q1: float
    q3: float
    iqr: float
    min: float
    max: float

    def to_dict(self) -> dict:
        return {
            "n": self.n, "mean": self.mean, "median": self.median,
            "q1": self.q1, "q3": self.q3, "iqr": self.iqr,
            "min": self.min, "max": self.max,
        }


def comparison_stats(
    series_a: Mapping,
    series_b: Mapping,
    method: str = "exclusive",
) -> ComparisonStats:
    """Summarize paired differences a[k] - b[k] over the shared keys."""
    if set(series_a) != set(series_b):
        raise KeyMismatch(
            f"series keys differ: {sorted(set(series_a) ^ set(series_b))!r}"
        )
    keys = sorted(series_a)
    if not keys:
        raise DegenerateSeries("comparison of empty series")
    diffs = [series_a[k] - series_b[k] for k in keys]
    q1, med, q3 = quartiles(diffs, method)
    return ComparisonStats(
        n=len(diffs),
        mean=statistics.fmean(diffs),
        median=med,
        q1=q1,
        q3=q3,
        iqr=q3 - q1,
        min=min(diffs),
        max=max(diffs),
    )
