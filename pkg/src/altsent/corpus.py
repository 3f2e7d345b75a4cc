"""Article records: parsing, validation, sampling, summaries and synthetic corpora.

Records are read from JSON Lines, one article per line::

    {"id": "a1", "title": "...", "abstract": "...", "author_count": 3,
     "subjects": ["Medicine"], "published_year": 2016,
     "tweets": [{"text": "...", "follower_count": 120,
                 "posted_at": "2016-04-01T10:00:00Z"}]}

``authors`` (a list) may stand in for ``author_count``; when both are
present the explicit count wins.
"""

from __future__ import annotations

import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

_YEAR_PREFIX = re.compile(r"^\s*(\d{4})")


class MalformedRecord(ValueError):
    """A JSONL line that cannot be bound to the record schema."""


@dataclass(frozen=True)
class TweetMention:
    text: str | None
    follower_count: int | None
    posted_at: str | None = None

    @property
    def posted_year(self) -> int | None:
        if not self.posted_at:
            return None
        m = _YEAR_PREFIX.match(self.posted_at)
        return int(m.group(1)) if m else None

    def is_valid(self) -> bool:
        return (
            isinstance(self.text, str)
            and bool(self.text.strip())
            and isinstance(self.follower_count, int)
            and self.follower_count >= 0
        )


@dataclass(frozen=True)
class ArticleRecord:
    id: str
    title: str | None
    abstract: str | None
    author_count: int | None
    subjects: tuple[str, ...] = ()
    tweets: tuple[TweetMention, ...] = ()
    publication_year: int | None = None

    def is_valid(self) -> bool:
        return (
            isinstance(self.title, str)
            and bool(self.title.strip())
            and isinstance(self.abstract, str)
            and bool(self.abstract.strip())
            and isinstance(self.author_count, int)
            and self.author_count >= 1
            and len(self.tweets) > 0
            and all(t.is_valid() for t in self.tweets)
        )

    def with_tweets(self, tweets: Iterable[TweetMention]) -> "ArticleRecord":
        return ArticleRecord(
            id=self.id,
            title=self.title,
            abstract=self.abstract,
            author_count=self.author_count,
            subjects=self.subjects,
            tweets=tuple(tweets),
            publication_year=self.publication_year,
        )


@dataclass
class CorpusSummary:
    tweets_per_year: dict[int, int] = field(default_factory=dict)
    tweets_per_subject: dict[str, int] = field(default_factory=dict)
    articles_per_subject: dict[str, int] = field(default_factory=dict)
    dropped_record_count: int = 0

    def to_dict(self) -> dict:
        return {
            "tweets_per_year": {str(y): c for y, c in self.tweets_per_year.items()},
            "tweets_per_subject": dict(self.tweets_per_subject),
            "articles_per_subject": dict(self.articles_per_subject),
            "dropped_record_count": self.dropped_record_count,
        }


# --------------------------------------------------------------------------
# parsing / serialization


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _opt_str(obj: dict, key: str) -> str | None:
    value = obj.get(key)
    if value is None or isinstance(value, str):
        return value
    raise MalformedRecord(f"field {key!r} must be a string")


def _opt_int(obj: dict, key: str) -> int | None:
    value = obj.get(key)
    if value is None or _is_int(value):
        return value
    raise MalformedRecord(f"field {key!r} must be an integer")


def _parse_tweet(obj) -> TweetMention:
    if not isinstance(obj, dict):
        raise MalformedRecord("tweet entries must be objects")
    return TweetMention(
        text=_opt_str(obj, "text"),
        follower_count=_opt_int(obj, "follower_count"),
        posted_at=_opt_str(obj, "posted_at"),
    )


def record_from_dict(obj) -> ArticleRecord:
    """Bind one decoded JSON object to an :class:`ArticleRecord`.

    Missing values are kept as ``None`` so that :func:`validate_and_filter`
    can drop them; wrong types raise :class:`MalformedRecord`.
    """
    if not isinstance(obj, dict):
        raise MalformedRecord("record must be a JSON object")
    rid = obj.get("id")
    if _is_int(rid):
        rid = str(rid)
    if not isinstance(rid, str) or not rid:
        raise MalformedRecord("record needs a string 'id'")

    author_count = _opt_int(obj, "author_count")
    if author_count is None and obj.get("authors") is not None:
        authors = obj["authors"]
        if not isinstance(authors, list):
            raise MalformedRecord("'authors' must be a list")
        author_count = len(authors)

    subjects = obj.get("subjects") or []
    if not isinstance(subjects, list) or not all(isinstance(s, str) for s in subjects):
        raise MalformedRecord("'subjects' must be a list of strings")
    tweets = obj.get("tweets") or []
    if not isinstance(tweets, list):
        raise MalformedRecord("'tweets' must be a list")

    return ArticleRecord(
        id=rid,
        title=_opt_str(obj, "title"),
        abstract=_opt_str(obj, "abstract"),
        author_count=author_count,
        subjects=tuple(dict.fromkeys(subjects)),
        tweets=tuple(_parse_tweet(t) for t in tweets),
        publication_year=_opt_int(obj, "published_year"),
    )


def record_to_dict(record: ArticleRecord) -> dict:
    out: dict = {
        "id": record.id,
        "title": record.title,
        "abstract": record.abstract,
        "author_count": record.author_count,
        "subjects": list(record.subjects),
    }
    if record.publication_year is not None:
        out["published_year"] = record.publication_year
    tweets = []
    for t in record.tweets:
        tw = {"text": t.text, "follower_count": t.follower_count}
        if t.posted_at is not None:
            tw["posted_at"] = t.posted_at
        tweets.append(tw)
    out["tweets"] = tweets
    return out


def parse_records(stream: IO[str] | Iterable[str]) -> tuple[list[ArticleRecord], int]:
    """Parse JSONL text into records.

    Returns the parsed records and the number of malformed lines that were
    skipped. Blank lines are ignored and not counted.
    """
    records: list[ArticleRecord] = []
    skipped = 0
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            records.append(record_from_dict(json.loads(line)))
        except (json.JSONDecodeError, MalformedRecord) as exc:
            skipped += 1
            logger.warning("skipping line %d: %s", lineno, exc)
    return records, skipped


def dump_records(records: Iterable[ArticleRecord], stream: IO[str]) -> None:
    for record in records:
        stream.write(json.dumps(record_to_dict(record), ensure_ascii=False))
        stream.write("\n")


def read_corpus(path) -> tuple[list[ArticleRecord], int]:
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh)


def write_corpus(records: Iterable[ArticleRecord], path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        dump_records(records, fh)


# --------------------------------------------------------------------------
# filtering, sampling, summaries


def validate_and_filter(records: Sequence[ArticleRecord]) -> tuple[list[ArticleRecord], int]:
    kept = [r for r in records if r.is_valid()]
    return kept, len(records) - len(kept)


def sample_without_replacement(
    records: Sequence[ArticleRecord], n: int, seed: int
) -> list[ArticleRecord]:
    """Uniformly sample ``n`` distinct records.

    Uses numpy's PCG64 generator (``np.random.default_rng(seed)``) and a
    without-replacement draw of indices. The sample is returned in input
    order so that output files diff cleanly.
    """
    if n < 0 or n > len(records):
        raise ValueError(f"sample size {n} outside [0, {len(records)}]")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(len(records), size=n, replace=False))
    return [records[i] for i in idx]


def summarize(records: Iterable[ArticleRecord], dropped_record_count: int = 0) -> CorpusSummary:
    per_year: Counter[int] = Counter()
    per_subject_tweets: Counter[str] = Counter()
    per_subject_articles: Counter[str] = Counter()
    for record in records:
        n_tweets = len(record.tweets)
        for subject in record.subjects:
            per_subject_tweets[subject] += n_tweets
            per_subject_articles[subject] += 1
        for tweet in record.tweets:
            year = tweet.posted_year
            if year is not None:
                per_year[year] += 1
    return CorpusSummary(
        tweets_per_year=dict(sorted(per_year.items())),
        tweets_per_subject=dict(sorted(per_subject_tweets.items())),
        articles_per_subject=dict(sorted(per_subject_articles.items())),
        dropped_record_count=dropped_record_count,
    )


# --------------------------------------------------------------------------
# synthetic corpora

SUBJECTS = (
    "Health Sciences", "Medicine", "Life Sciences", "Physical Sciences",
    "Social Sciences", "Nursing", "Psychology", "Computer Science",
    "Environmental Science", "Agricultural and Biological Sciences",
)

FILLER_WORDS = (
    "study", "results", "paper", "research", "data", "analysis", "model",
    "patients", "cells", "effects", "method", "sample", "review", "trial",
    "using", "across", "between", "within", "during", "among", "role",
    "evidence", "population", "measure", "response", "factors", "risk",
    "cohort", "survey", "climate", "protein", "network", "species", "water",
    "brain", "children", "health", "energy", "system", "school", "article",
    "published", "team", "online", "read", "via", "findings", "report",
    "the", "of", "in", "on", "for", "with", "from", "and", "a", "an",
)

_CLASSES = ("Positive", "Negative", "Neutral")


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of :func:`generate_synthetic_corpus`.

    ``mix`` gives the relative share of Positive, Negative and Neutral
    target articles; counts are apportioned exactly (largest remainder).
    ``label_noise`` is the probability that an article's title class is
    redrawn uniformly from the three classes, independently of its tweets. ``title_quote_rate`` is the
    probability that a same-class tweet repeats the title verbatim.
    """

    n_articles: int
    seed: int = 0
    mix: tuple[float, float, float] = (1.0, 1.0, 1.0)
    label_noise: float = 0.0
    title_quote_rate: float = 0.0
    max_tweets: int = 5

    def validate(self) -> None:
        if not _is_int(self.n_articles) or self.n_articles < 0:
            raise ValueError("n_articles must be a non-negative integer")
        if len(self.mix) != 3 or any(m < 0 for m in self.mix) or sum(self.mix) <= 0:
            raise ValueError("mix needs three non-negative weights with a positive sum")
        if not 0.0 <= self.label_noise <= 1.0:
            raise ValueError("label_noise must lie in [0, 1]")
        if not 0.0 <= self.title_quote_rate <= 1.0:
            raise ValueError("title_quote_rate must lie in [0, 1]")
        if self.max_tweets < 1:
            raise ValueError("max_tweets must be >= 1")


def apportion(total: int, weights: Sequence[float]) -> list[int]:
    """Split ``total`` into integer parts proportional to ``weights``."""
    w = np.asarray(weights, dtype=float)
    raw = total * w / w.sum()
    counts = np.floor(raw).astype(int)
    # stable argsort keeps earlier classes first on equal remainders
    order = np.argsort(-(raw - counts), kind="stable")
    for i in order[: total - counts.sum()]:
        counts[i] += 1
    return counts.tolist()


def generate_synthetic_corpus(spec: SyntheticSpec, lexicon) -> list[ArticleRecord]:
    """Build a schema-valid corpus with planted sentiment.

    Every tweet of an article carries sentiment words of the article's
    target class only (none for Neutral), so each tweet's score has the
    planted sign under both scoring profiles.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)

    blocked = set(lexicon.entries) | set(lexicon.boosters) | set(lexicon.negations)
    filler = [w for w in FILLER_WORDS if w not in blocked]
    words = {
        "Positive": sorted(t for t, v in lexicon.entries.items() if v > 0 and t.isalpha()),
        "Negative": sorted(t for t, v in lexicon.entries.items() if v < 0 and t.isalpha()),
        "Neutral": [],
    }
    for cls, ratio in zip(_CLASSES, spec.mix):
        if ratio > 0 and cls != "Neutral" and not words[cls]:
            raise ValueError(f"lexicon has no {cls.lower()} words to plant")

    counts = apportion(spec.n_articles, spec.mix)
    targets = [c for c, k in zip(_CLASSES, counts) for _ in range(k)]
    targets = [targets[i] for i in rng.permutation(len(targets))]

    def sentence(n_filler: int, cls: str, n_sent: int) -> list[str]:
        toks = [filler[i] for i in rng.integers(0, len(filler), size=n_filler)]
        pool = words[cls]
        for _ in range(n_sent if pool else 0):
            toks.insert(int(rng.integers(0, len(toks) + 1)), pool[int(rng.integers(0, len(pool)))])
        return toks

    records = []
    for i, target in enumerate(targets):
        title_cls = target
        if rng.random() < spec.label_noise:
            title_cls = _CLASSES[int(rng.integers(0, 3))]
        title = " ".join(sentence(int(rng.integers(5, 11)), title_cls, int(rng.integers(1, 3))))
        title = title[0].upper() + title[1:]

        abstract_cls = title_cls if rng.random() < 0.6 else _CLASSES[int(rng.integers(0, 3))]
        abstract = " ".join(sentence(int(rng.integers(30, 81)), abstract_cls, int(rng.integers(1, 4)))) + "."

        year = int(rng.integers(2011, 2019))
        tweets = []
        for _ in range(int(rng.integers(1, spec.max_tweets + 1))):
            if title_cls == target and rng.random() < spec.title_quote_rate:
                text = title
            else:
                text = " ".join(sentence(int(rng.integers(4, 13)), target, int(rng.integers(1, 3))))
                if target != "Neutral" and rng.random() < 0.2:
                    text += "!"
            posted = min(2018, year + int(rng.integers(0, 2)))
            tweets.append(TweetMention(
                text=text,
                follower_count=int(rng.lognormal(6.0, 1.5)),
                posted_at=f"{posted}-{int(rng.integers(1, 13)):02d}-{int(rng.integers(1, 29)):02d}T12:00:00Z",
            ))
        n_subj = int(rng.integers(1, 4))
        subjects = tuple(SUBJECTS[j] for j in sorted(rng.choice(len(SUBJECTS), n_subj, replace=False)))
        records.append(ArticleRecord(
            id=f"syn-{spec.seed}-{i:06d}",
            title=title,
            abstract=abstract,
            author_count=1 + int(rng.poisson(4)),
            subjects=subjects,
            tweets=tuple(tweets),
            publication_year=year,
        ))
    return records
