"""Lexicon rule-based sentiment scoring.

Two scoring profiles share one tokenizer and lexicon format:

* ``valence-rule``: sums per-token valences adjusted by negation, booster
  words, ALL-CAPS emphasis and exclamation marks, then squashes the sum
  into (-1, 1) with ``x / sqrt(x**2 + alpha)``.
* ``polarity-mean``: the mean of matched token valences (negated tokens
  scaled by the negation factor); 0 when nothing matches.
"""

from __future__ import annotations

import enum
import io
import math
import string
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from os import PathLike
from typing import IO, Iterable

VALENCE_RULE = "valence-rule"
POLARITY_MEAN = "polarity-mean"
PROFILES = (VALENCE_RULE, POLARITY_MEAN)

# valence-rule lexicons live on [-4, 4]; polarity-mean on [-1, 1]
PROFILE_BOUND = {VALENCE_RULE: 4.0, POLARITY_MEAN: 1.0}

_PUNCT = string.punctuation + "‘’“”…«»"


class LexiconError(ValueError):
    pass


class Polarity(str, enum.Enum):
    NEGATIVE = "Negative"
    NEUTRAL = "Neutral"
    POSITIVE = "Positive"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Lexicon:
    entries: dict[str, float] = field(default_factory=dict)
    boosters: dict[str, float] = field(default_factory=dict)
    negations: frozenset[str] = frozenset()

    @cached_property
    def max_abs_valence(self) -> float:
        return max((abs(v) for v in self.entries.values()), default=0.0)

    def scaled(self, factor: float) -> "Lexicon":
        return Lexicon({t: v * factor for t, v in self.entries.items()}, dict(self.boosters), self.negations)

    def negated(self) -> "Lexicon":
        return self.scaled(-1.0)

    def for_profile(self, profile: str) -> "Lexicon":
        """Return a lexicon whose valences fit ``profile``'s range.

        A lexicon on the valence-rule scale used with the polarity-mean
        profile is divided by 4; anything already in range is returned as is.
        """
        bound = PROFILE_BOUND[profile]
        if self.max_abs_valence <= bound:
            return self
        if profile == POLARITY_MEAN and self.max_abs_valence <= PROFILE_BOUND[VALENCE_RULE]:
            return self.scaled(1.0 / PROFILE_BOUND[VALENCE_RULE])
        raise LexiconError(f"valences exceed +/-{bound} for profile {profile!r}")


@dataclass(frozen=True)
class ScorerConfig:
    profile: str = VALENCE_RULE
    negation_window: int = 3
    negation_factor: float = -0.74
    booster_increment_scale: float = 0.293
    exclamation_increment: float = 0.292
    exclamation_cap: int = 3
    caps_amplifier: float = 1.733
    normalization_alpha: float = 15.0

    def __post_init__(self):
        if self.profile not in PROFILES:
            raise ValueError(f"unknown profile {self.profile!r}")
        if self.negation_window < 0:
            raise ValueError("negation_window must be >= 0")
        if self.exclamation_cap < 0:
            raise ValueError("exclamation_cap must be >= 0")
        if self.normalization_alpha <= 0:
            raise ValueError("normalization_alpha must be > 0")

    @classmethod
    def valence_rule(cls, **overrides) -> "ScorerConfig":
        return cls(profile=VALENCE_RULE, **overrides)

    @classmethod
    def polarity_mean(cls, **overrides) -> "ScorerConfig":
        params = dict(
            profile=POLARITY_MEAN,
            negation_factor=-0.5,
            booster_increment_scale=0.0,
            exclamation_increment=0.0,
            exclamation_cap=0,
            caps_amplifier=1.0,
        )
        params.update(overrides)
        return cls(**params)

    @classmethod
    def for_profile(cls, profile: str) -> "ScorerConfig":
        return cls.valence_rule() if profile == VALENCE_RULE else cls.polarity_mean()


# --------------------------------------------------------------------------
# lexicon loading


def _parse_lexicon(lines: Iterable[str], source: str) -> Lexicon:
    entries: dict[str, float] = {}
    boosters: dict[str, float] = {}
    negations: set[str] = set()
    section = "entries"
    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\r\n")
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("[") and stripped.endswith("]"):
            section = stripped[1:-1].strip().lower()
            if section not in ("entries", "boosters", "negations"):
                raise LexiconError(f"{source}:{lineno}: unknown section [{section}]")
            continue
        cols = line.split("\t")
        token = cols[0].strip().lower()
        if not token:
            raise LexiconError(f"{source}:{lineno}: empty token")
        if section == "negations":
            negations.add(token)
            continue
        if len(cols) < 2:
            raise LexiconError(f"{source}:{lineno}: expected token<TAB>valence")
        try:
            value = float(cols[1])
        except ValueError:
            raise LexiconError(f"{source}:{lineno}: non-numeric valence {cols[1]!r}") from None
        if not math.isfinite(value):
            raise LexiconError(f"{source}:{lineno}: non-finite valence {cols[1]!r}")
        (boosters if section == "boosters" else entries)[token] = value
    return Lexicon(entries, boosters, frozenset(negations))


def load_lexicon(source: str | PathLike | IO[str]) -> Lexicon:
    """Load a TSV lexicon from a path or an open text stream.

    Rows are ``token<TAB>valence``; ``#`` lines are comments. Rows after a
    ``[boosters]`` header are booster increments, rows after
    ``[negations]`` are negation tokens (any valence column is ignored).
    Later duplicates overwrite earlier ones.
    """
    if hasattr(source, "read"):
        return _parse_lexicon(source, getattr(source, "name", "<stream>"))
    with open(source, encoding="utf-8") as fh:
        return _parse_lexicon(fh, str(source))


def sample_lexicon() -> Lexicon:
    """The small valence-rule lexicon bundled with the package."""
    text = resources.files("altsent.data").joinpath("sample_lexicon.tsv").read_text(encoding="utf-8")
    return _parse_lexicon(io.StringIO(text), "sample_lexicon.tsv")


# --------------------------------------------------------------------------
# scoring


def tokenize(text: str, lexicon: Lexicon | None = None) -> list[str]:
    """Whitespace tokens with surrounding punctuation removed.

    Case is preserved (callers need it for emphasis detection). A token
    that is itself a lexicon entry, e.g. an emoticon like ``:)``, is kept
    verbatim.
    """
    tokens = []
    for raw in text.split():
        if lexicon is not None and raw.lower() in lexicon.entries:
            tokens.append(raw)
            continue
        tok = raw.strip(_PUNCT)
        if tok:
            tokens.append(tok)
    return tokens


def _is_negation(token: str, lexicon: Lexicon) -> bool:
    return token in lexicon.negations or token.endswith("n't")


def _negated(lower: list[str], i: int, window: int, lexicon: Lexicon) -> bool:
    return any(_is_negation(t, lexicon) for t in lower[max(0, i - window):i])


def _valence_rule(text: str, lexicon: Lexicon, config: ScorerConfig) -> float:
    tokens = tokenize(text, lexicon)
    lower = [t.lower() for t in tokens]
    n_caps = sum(1 for t in tokens if t.isupper())
    cap_differential = 0 < n_caps < len(tokens)

    total = 0.0
    for i, tok in enumerate(lower):
        if tok in lexicon.boosters:
            continue
        valence = lexicon.entries.get(tok)
        if valence is None:
            continue
        if _negated(lower, i, config.negation_window, lexicon):
            valence *= config.negation_factor
        increment = 0.0
        j = i - 1
        while j >= 0 and lower[j] in lexicon.boosters:
            increment += lexicon.boosters[lower[j]] * config.booster_increment_scale
            j -= 1
        if valence > 0:
            valence += increment
        elif valence < 0:
            valence -= increment
        if cap_differential and tokens[i].isupper():
            valence *= config.caps_amplifier
        total += valence

    bangs = min(text.count("!"), config.exclamation_cap) * config.exclamation_increment
    if total > 0:
        total += bangs
    elif total < 0:
        total -= bangs
    score = total / math.sqrt(total * total + config.normalization_alpha)
    return min(1.0, max(-1.0, score))


def _polarity_mean(text: str, lexicon: Lexicon, config: ScorerConfig) -> float:
    lower = [t.lower() for t in tokenize(text, lexicon)]
    hits = []
    for i, tok in enumerate(lower):
        valence = lexicon.entries.get(tok)
        if valence is None:
            continue
        if _negated(lower, i, config.negation_window, lexicon):
            valence *= config.negation_factor
        hits.append(valence)
    if not hits:
        return 0.0
    return min(1.0, max(-1.0, math.fsum(hits) / len(hits)))


def score_text(text: str, lexicon: Lexicon, config: ScorerConfig | None = None) -> float:
    """Score ``text`` in [-1, 1] with the profile named in ``config``."""
    config = config or ScorerConfig()
    if lexicon.max_abs_valence > PROFILE_BOUND[config.profile]:
        raise LexiconError(
            f"lexicon valences exceed +/-{PROFILE_BOUND[config.profile]} for {config.profile!r};"
            " use Lexicon.for_profile()"
        )
    if config.profile == VALENCE_RULE:
        return _valence_rule(text, lexicon, config)
    return _polarity_mean(text, lexicon, config)


def classify_score(score: float) -> Polarity:
    """Map a score to its class: [-1, 0) Negative, 0 Neutral, (0, 1] Positive."""
    if not -1.0 <= score <= 1.0:
        raise ValueError(f"score {score!r} outside [-1, 1]")
    if score < 0:
        return Polarity.NEGATIVE
    if score > 0:
        return Polarity.POSITIVE
    return Polarity.NEUTRAL


def _field_texts(record, field_name: str) -> list[str]:
    if field_name == "title":
        return [record.title or ""]
    if field_name == "abstract":
        return [record.abstract or ""]
    if field_name == "tweets":
        return [t.text or "" for t in record.tweets]
    raise ValueError(f"field must be title, abstract or tweets, not {field_name!r}")


def top_words(records, field_name: str, k: int, lexicon: Lexicon) -> tuple[list[str], list[str]]:
    """The ``k`` most positive and ``k`` most negative lexicon words in a field.

    Positive words are ordered by descending valence, negative words by
    ascending valence; equal valences fall back to alphabetical order.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    seen: set[str] = set()
    for record in records:
        for text in _field_texts(record, field_name):
            seen.update(t.lower() for t in tokenize(text, lexicon))
    scored = [(t, lexicon.entries[t]) for t in seen if t in lexicon.entries]
    positive = sorted((p for p in scored if p[1] > 0), key=lambda p: (-p[1], p[0]))
    negative = sorted((p for p in scored if p[1] < 0), key=lambda p: (p[1], p[0]))
    return [t for t, _ in positive[:k]], [t for t, _ in negative[:k]]
