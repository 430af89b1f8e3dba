"""Article segmentation, summary-to-article sentence mapping, and
positional distributions.

An article of n sentences is cut into k near-equal index intervals; each
summary sentence is mapped to the article sentence(s) it most resembles,
and the mapped sentences' segment memberships pool into a length-k
probability vector over article positions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import ConfigError, DataError
from .simmetrics import TfidfSpace, build_tfidf_space, embed_tfidf, rouge_n, sparse_dot
from .textproc import SentenceList, tokenize

PHI_CHOICES = ("tfidf", "rouge1")
TOP_N_CHOICES = (1, 2, 3)
POSITION_MODES = ("normalized", "index")
AGGREGATION_MODES = ("pooled", "averaged")


@dataclass(frozen=True, eq=False)
class SegmentationPlan:
    """k contiguous index intervals covering an n-sentence article.

    Interval j (1-based) is [(j-1)c + min(j-1, d), jc + min(j, d) - 1] with
    c = n // k and d = n % k, so the first d intervals hold c + 1 sentences
    and the rest hold c.  Bounds are inclusive 0-based sentence indices.
    """

    k: int
    n: int
    c: int
    d: int
    lows: np.ndarray
    highs: np.ndarray

    @property
    def intervals(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.lows.tolist(), self.highs.tolist()))

    def segment_of(self, sentence_index: int) -> int:
        """1-based segment index containing a 0-based sentence index."""
        if not 0 <= sentence_index < self.n:
            raise ValueError(
                f"sentence index {sentence_index} outside [0, {self.n})"
            )
        boundary = self.d * (self.c + 1)
        if sentence_index < boundary:
            return sentence_index // (self.c + 1) + 1
        return self.d + (sentence_index - boundary) // self.c + 1


def segment_article(n: int, k: int) -> SegmentationPlan:
    """Divide an n-sentence article into k near-equal segments."""
    if k < 1:
        raise ValueError(f"segment count must be >= 1, got {k}")
    if n < 1:
        raise ValueError(f"article length must be >= 1, got {n}")
    if k > n:
        raise ValueError(
            f"segment count {k} exceeds article length {n}; every segment must hold a sentence"
        )
    c, d = divmod(n, k)
    j = np.arange(1, k + 1)
    lows = (j - 1) * c + np.minimum(j - 1, d)
    highs = j * c + np.minimum(j, d) - 1
    lows.flags.writeable = False
    highs.flags.writeable = False
    return SegmentationPlan(k=k, n=n, c=c, d=d, lows=lows, highs=highs)


@dataclass(frozen=True)
class MappingConfig:
    """How summary sentences are matched to article sentences."""

    phi: str = "tfidf"
    top_n: int = 1
    zero_score_policy: Literal["unmapped"] = "unmapped"

    def __post_init__(self) -> None:
        if self.phi not in PHI_CHOICES:
            raise ConfigError(f"phi must be one of {PHI_CHOICES}, got {self.phi!r}")
        if self.top_n not in TOP_N_CHOICES:
            raise ConfigError(f"top_n must be one of {TOP_N_CHOICES}, got {self.top_n}")


@dataclass(frozen=True)
class MappedSentence:
    """One summary sentence's matches: article indices with their scores.

    Indices are ordered by descending score, ties broken by ascending
    article index.  ``unmapped`` means no article sentence scored above 0.
    """

    article_indices: tuple[int, ...]
    scores: tuple[float, ...]
    unmapped: bool

    def segment_indices(self, plan: SegmentationPlan) -> tuple[int, ...]:
        return tuple(plan.segment_of(i) for i in self.article_indices)


@dataclass(frozen=True)
class SentenceMapping:
    """Per-summary-sentence mapping results for one (summary, article) pair."""

    entries: tuple[MappedSentence, ...]

    @property
    def total_sentences(self) -> int:
        return len(self.entries)

    @property
    def unmapped_count(self) -> int:
        return sum(1 for e in self.entries if e.unmapped)

    def contributions(self) -> Iterable[int]:
        """All chosen article indices, one per (sentence, match) pair."""
        for entry in self.entries:
            yield from entry.article_indices


def map_summary(
    summary_sentences: SentenceList,
    article_sentences: SentenceList,
    config: MappingConfig = MappingConfig(),
) -> SentenceMapping:
    """Match each summary sentence to its top-n most similar article sentences.

    Under TF-IDF the space is built from this article's sentences only, so
    corpus-level statistics never leak into a per-article alignment.
    """
    if len(article_sentences) == 0:
        raise DataError("cannot map a summary against an empty article")
    article_tokens = [tokenize(s) for s in article_sentences]

    if config.phi == "tfidf":
        space = build_tfidf_space(article_tokens)
        doc_vectors = [embed_tfidf(tokens, space) for tokens in article_tokens]
        scorer = _TfidfScorer(space, doc_vectors)
    else:
        scorer = _Rouge1Scorer(article_tokens)

    entries = []
    for sentence in summary_sentences:
        scores = scorer.score_all(tokenize(sentence))
        entries.append(_select_top(scores, config.top_n))
    return SentenceMapping(entries=tuple(entries))


class _TfidfScorer:
    def __init__(self, space: TfidfSpace, doc_vectors: list[dict[int, float]]):
        self.space = space
        self.doc_vectors = doc_vectors

    def score_all(self, query_tokens: list[str]) -> list[float]:
        query = embed_tfidf(query_tokens, self.space)
        if not query:
            return [0.0] * len(self.doc_vectors)
        return [sparse_dot(query, doc) for doc in self.doc_vectors]


class _Rouge1Scorer:
    def __init__(self, article_tokens: list[list[str]]):
        self.article_tokens = article_tokens

    def score_all(self, query_tokens: list[str]) -> list[float]:
        return [rouge_n(query_tokens, doc, 1) for doc in self.article_tokens]


def _select_top(scores: list[float], top_n: int) -> MappedSentence:
    ranked = sorted(
        ((score, index) for index, score in enumerate(scores) if score > 0.0),
        key=lambda pair: (-pair[0], pair[1]),
    )[:top_n]
    if not ranked:
        return MappedSentence(article_indices=(), scores=(), unmapped=True)
    return MappedSentence(
        article_indices=tuple(index for _, index in ranked),
        scores=tuple(score for score, _ in ranked),
        unmapped=False,
    )


@dataclass(frozen=True)
class PositionalDistribution:
    """A probability vector over the k article segments.

    ``support_positions`` places segment j at j/k on a normalized (0, 1]
    axis by default; index mode uses the raw segment index j instead, which
    scales Wasserstein distances by k.
    """

    k: int
    mass: tuple[float, ...]
    support_positions: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.mass) != self.k or len(self.support_positions) != self.k:
            raise ValueError("mass and support_positions must have length k")
        if any(m < 0 for m in self.mass):
            raise ValueError("mass values must be non-negative")
        if abs(sum(self.mass) - 1.0) > 1e-12:
            raise ValueError(f"mass must sum to 1, got {sum(self.mass)!r}")
        positions = self.support_positions
        if positions[0] <= 0 or any(
            positions[i] >= positions[i + 1] for i in range(self.k - 1)
        ):
            raise ValueError("support positions must be positive and strictly increasing")


def support_positions(k: int, mode: str = "normalized") -> tuple[float, ...]:
    if mode == "normalized":
        return tuple(j / k for j in range(1, k + 1))
    if mode == "index":
        return tuple(float(j) for j in range(1, k + 1))
    raise ConfigError(f"bin positions mode must be one of {POSITION_MODES}, got {mode!r}")


def distribution_from_counts(
    counts: Sequence[float], positions_mode: str = "normalized"
) -> PositionalDistribution:
    total = float(sum(counts))
    if total <= 0:
        raise DataError("cannot normalize a distribution with zero total mass")
    k = len(counts)
    return PositionalDistribution(
        k=k,
        mass=tuple(c / total for c in counts),
        support_positions=support_positions(k, positions_mode),
    )


def accumulate_distribution(
    mappings: Sequence[tuple[SentenceMapping, SegmentationPlan]],
    k: int,
    positions_mode: str = "normalized",
    aggregation: str = "pooled",
) -> tuple[PositionalDistribution, float]:
    """Pool mapped-sentence segment hits into one distribution.

    Every (summary sentence, matched article index) pair contributes one
    count to the segment containing that index.  ``pooled`` normalizes the
    corpus-wide counts, weighting articles by how many mapped contributions
    they produce; ``averaged`` normalizes per article first and averages
    the per-article distributions.  Returns the distribution and the
    fraction of summary sentences that mapped nowhere.
    """
    if aggregation not in AGGREGATION_MODES:
        raise ConfigError(
            f"aggregation must be one of {AGGREGATION_MODES}, got {aggregation!r}"
        )
    total_sentences = 0
    unmapped = 0
    pooled = [0.0] * k
    averaged = [0.0] * k
    articles_with_mass = 0
    for mapping, plan in mappings:
        if plan.k != k:
            raise ValueError(f"plan has k={plan.k}, expected {k}")
        total_sentences += mapping.total_sentences
        unmapped += mapping.unmapped_count
        article_counts = [0] * k
        for article_index in mapping.contributions():
            article_counts[plan.segment_of(article_index) - 1] += 1
        article_total = sum(article_counts)
        if article_total == 0:
            continue
        articles_with_mass += 1
        for j in range(k):
            pooled[j] += article_counts[j]
            averaged[j] += article_counts[j] / article_total

    if total_sentences == 0 or sum(pooled) == 0:
        raise DataError("no summary sentence mapped to any article sentence")

    if aggregation == "pooled":
        distribution = distribution_from_counts(pooled, positions_mode)
    else:
        distribution = distribution_from_counts(
            [v / articles_with_mass for v in averaged], positions_mode
        )
    return distribution, unmapped / total_sentences
