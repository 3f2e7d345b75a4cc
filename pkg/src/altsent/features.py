"""Per-article model features, title-overlap filtering and dataset assembly.

Feature columns, in this fixed order::

    title_sentiment, abstract_sentiment, abstract_length, tweet_reach, author_count

The target is the aggregated sentiment of the article's tweets.
"""

from __future__ import annotations

import csv
import enum
import math
import statistics
import string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from difflib import SequenceMatcher
from typing import Sequence

import numpy as np

from .corpus import ArticleRecord
from .sentiment import (
    POLARITY_MEAN,
    VALENCE_RULE,
    Lexicon,
    Polarity,
    ScorerConfig,
    classify_score,
    score_text,
)

FEATURE_COLUMNS = (
    "title_sentiment",
    "abstract_sentiment",
    "abstract_length",
    "tweet_reach",
    "author_count",
)
CSV_HEADER = ("article_id",) + FEATURE_COLUMNS + ("target_score", "target_label")
LABEL_ORDER = (Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.NEUTRAL)

_STRIP = string.punctuation + "‘’“”…«»"


class AggregationMetric(str, enum.Enum):
    MEAN = "mean"
    MEDIAN = "median"


class DatasetVariant(str, enum.Enum):
    A = "A"  # all tweets
    B = "B"  # tweets overlapping the title removed


@dataclass(frozen=True)
class CaseConfig:
    case_id: int
    scorer_profile: str
    metric: AggregationMetric

    @classmethod
    def from_id(cls, case_id: int) -> "CaseConfig":
        try:
            profile, metric = _CASES[case_id]
        except KeyError:
            raise ValueError(f"case must be 1..4, got {case_id!r}") from None
        return cls(case_id, profile, metric)


_CASES = {
    1: (VALENCE_RULE, AggregationMetric.MEAN),
    2: (VALENCE_RULE, AggregationMetric.MEDIAN),
    3: (POLARITY_MEAN, AggregationMetric.MEAN),
    4: (POLARITY_MEAN, AggregationMetric.MEDIAN),
}


@dataclass(frozen=True)
class ArticleFeatures:
    article_id: str
    title_sentiment: float
    abstract_sentiment: float
    abstract_length: int
    tweet_reach: float
    author_count: int
    target_score: float
    target_label: Polarity

    def row(self) -> list[float]:
        return [
            self.title_sentiment,
            self.abstract_sentiment,
            float(self.abstract_length),
            self.tweet_reach,
            float(self.author_count),
        ]


@dataclass
class Dataset:
    """Feature matrix, aligned labels and the class distribution."""

    ids: list[str]
    X: np.ndarray
    target_scores: np.ndarray
    labels: list[Polarity]
    feature_names: tuple[str, ...] = FEATURE_COLUMNS

    @property
    def distribution(self) -> dict[str, int]:
        counts = {p.value: 0 for p in LABEL_ORDER}
        for label in self.labels:
            counts[Polarity(label).value] += 1
        return counts

    def __len__(self) -> int:
        return len(self.ids)


def aggregate_sentiments(scores: Sequence[float], metric: AggregationMetric | str) -> float:
    if len(scores) == 0:
        raise ValueError("cannot aggregate an empty list of scores")
    metric = AggregationMetric(metric)
    if metric is AggregationMetric.MEAN:
        value = math.fsum(scores) / len(scores)
    else:
        value = statistics.median(scores)
    # keep rounding from escaping [min, max]
    return min(max(value, min(scores)), max(scores))


def _overlap_tokens(text: str) -> list[str]:
    out = []
    for raw in (text or "").lower().split():
        tok = raw.strip(_STRIP)
        if tok:
            out.append(tok)
    return out


def title_overlap_ratio(tweet_text: str, title: str) -> float:
    """Token-level Ratcliff-Obershelp similarity, ``2*M / (len_a + len_b)``.

    Both texts are case-folded and stripped of surrounding punctuation
    before tokenizing on whitespace. Two empty texts give 0.
    """
    a, b = _overlap_tokens(tweet_text), _overlap_tokens(title)
    if not a and not b:
        return 0.0
    return SequenceMatcher(None, a, b, autojunk=False).ratio()


def apply_title_filter(records: Sequence[ArticleRecord], threshold: float = 0.7) -> list[ArticleRecord]:
    """Drop tweets whose title overlap is >= ``threshold`` (dataset B).

    Articles left without tweets are dropped.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {threshold!r}")
    out = []
    for record in records:
        kept = [t for t in record.tweets if title_overlap_ratio(t.text or "", record.title or "") < threshold]
        if kept:
            out.append(record if len(kept) == len(record.tweets) else record.with_tweets(kept))
    return out


def derive_features(record: ArticleRecord, lexicon: Lexicon, case: CaseConfig) -> ArticleFeatures:
    lex = lexicon.for_profile(case.scorer_profile)
    config = ScorerConfig.for_profile(case.scorer_profile)
    tweet_scores = [score_text(t.text or "", lex, config) for t in record.tweets]
    target = aggregate_sentiments(tweet_scores, case.metric)
    reach = math.fsum(t.follower_count or 0 for t in record.tweets) / len(record.tweets)
    return ArticleFeatures(
        article_id=record.id,
        title_sentiment=score_text(record.title or "", lex, config),
        abstract_sentiment=score_text(record.abstract or "", lex, config),
        abstract_length=len((record.abstract or "").split()),
        tweet_reach=reach,
        author_count=record.author_count,
        target_score=target,
        target_label=classify_score(target),
    )


def build_dataset(
    records: Sequence[ArticleRecord],
    lexicon: Lexicon,
    case: CaseConfig,
    variant: DatasetVariant | str = DatasetVariant.A,
    workers: int = 1,
) -> Dataset:
    if DatasetVariant(variant) is DatasetVariant.B:
        records = apply_title_filter(records)
    lexicon = lexicon.for_profile(case.scorer_profile)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda r: derive_features(r, lexicon, case), records))
    else:
        rows = [derive_features(r, lexicon, case) for r in records]
    return dataset_from_features(rows)


def dataset_from_features(rows: Sequence[ArticleFeatures]) -> Dataset:
    X = np.array([r.row() for r in rows], dtype=float).reshape(len(rows), len(FEATURE_COLUMNS))
    return Dataset(
        ids=[r.article_id for r in rows],
        X=X,
        target_scores=np.array([r.target_score for r in rows], dtype=float),
        labels=[r.target_label for r in rows],
    )


def format_distribution(dataset: Dataset, case: CaseConfig) -> str:
    """One row in the layout of the per-case sentiment tables."""
    total = len(dataset)
    dist = dataset.distribution
    cells = []
    for label in LABEL_ORDER:
        n = dist[label.value]
        pct = 100.0 * n / total if total else 0.0
        cells.append(f"{n:,} (~{pct:.1f}%)")
    return f"case {case.case_id} | {case.scorer_profile} | {case.metric.value} | " + " | ".join(cells)


# --------------------------------------------------------------------------
# CSV exchange


def write_feature_csv(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("article_id",) + tuple(dataset.feature_names) + ("target_score", "target_label"))
        for i, rid in enumerate(dataset.ids):
            # repr round-trips floats exactly
            writer.writerow(
                [rid]
                + [repr(float(v)) for v in dataset.X[i]]
                + [repr(float(dataset.target_scores[i])), Polarity(dataset.labels[i]).value]
            )


class FeatureFileError(ValueError):
    pass


def read_feature_csv(path) -> Dataset:
    """Read a feature CSV; feature columns are whatever sits between the id and target columns."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FeatureFileError(f"{path}: empty feature file") from None
        if len(header) < 3 or header[0] != "article_id" or header[-2:] != ["target_score", "target_label"]:
            raise FeatureFileError(f"{path}: unexpected header {header}")
        names = tuple(header[1:-2])
        ids, rows, scores, labels = [], [], [], []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise FeatureFileError(f"{path}:{lineno}: expected {len(header)} columns")
            try:
                rows.append([float(v) for v in row[1:-2]])
                scores.append(float(row[-2]))
                labels.append(Polarity(row[-1]))
            except ValueError as exc:
                raise FeatureFileError(f"{path}:{lineno}: {exc}") from None
            ids.append(row[0])
    X = np.array(rows, dtype=float).reshape(len(rows), len(names))
    return Dataset(ids, X, np.array(scores, dtype=float), labels, names)


# --------------------------------------------------------------------------
# correlation


def correlation_matrix(matrix: np.ndarray, target: np.ndarray | None = None) -> np.ndarray:
    """Pearson correlations between the columns of ``matrix`` (and ``target``).

    When ``target`` is given it is appended as the last column. A constant
    column has no defined correlation: its whole row and column, diagonal
    included, are NaN.
    """
    M = np.asarray(matrix, dtype=float)
    if M.ndim != 2:
        raise ValueError("matrix must be 2-D")
    if target is not None:
        M = np.column_stack([M, np.asarray(target, dtype=float)])
    if M.shape[0] < 2:
        raise ValueError("need at least two rows")
    centered = M - M.mean(axis=0)
    norms = np.sqrt((centered**2).sum(axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        r = (centered.T @ centered) / np.outer(norms, norms)
    r = np.clip(r, -1.0, 1.0)
    const = np.ptp(M, axis=0) == 0
    r[const, :] = np.nan
    r[:, const] = np.nan
    idx = np.flatnonzero(~const)
    r[idx, idx] = 1.0
    return r
