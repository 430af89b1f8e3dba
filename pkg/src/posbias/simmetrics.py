"""Similarity and overlap metrics: TF-IDF cosine and ROUGE-1/2/L.

The same functions serve two roles: as the mapping function that aligns
summary sentences with article sentences, and as the corpus-level quality
metric between generated and gold summaries.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import DataError
from .textproc import TokenList, ngrams, tokenize


@dataclass(frozen=True)
class TfidfSpace:
    """Vocabulary, smoothed idf weights, and the document count behind them.

    idf(t) = ln((1 + N) / (1 + df(t))) + 1, so every in-vocabulary weight is
    finite and strictly positive.
    """

    vocabulary: dict[str, int]
    idf: tuple[float, ...]
    doc_count: int


@dataclass(frozen=True)
class RougeScores:
    r1: float
    r2: float
    rl: float


def build_tfidf_space(documents: Sequence[TokenList]) -> TfidfSpace:
    """Fit vocabulary and idf weights over a document collection."""
    if not documents:
        raise DataError("cannot build a TF-IDF space from zero documents")
    df: Counter[str] = Counter()
    for doc in documents:
        df.update(set(doc))
    vocabulary = {token: index for index, token in enumerate(sorted(df))}
    n = len(documents)
    idf = [0.0] * len(vocabulary)
    for token, index in vocabulary.items():
        idf[index] = math.log((1 + n) / (1 + df[token])) + 1.0
    return TfidfSpace(vocabulary=vocabulary, idf=tuple(idf), doc_count=n)


def embed_tfidf(tokens: TokenList, space: TfidfSpace) -> dict[int, float]:
    """L2-normalized raw-tf x idf vector, sparse over the space's vocabulary.

    Out-of-vocabulary tokens contribute nothing; an all-zero embedding
    returns an empty mapping.
    """
    counts: Counter[int] = Counter()
    vocabulary = space.vocabulary
    for token in tokens:
        index = vocabulary.get(token)
        if index is not None:
            counts[index] += 1
    if not counts:
        return {}
    idf = space.idf
    vector = {index: tf * idf[index] for index, tf in counts.items()}
    norm = math.sqrt(sum(w * w for w in vector.values()))
    return {index: w / norm for index, w in vector.items()}


def tfidf_cosine(query: TokenList, doc: TokenList, space: TfidfSpace) -> float:
    """Cosine similarity of the two TF-IDF embeddings; 0 if either is all-zero."""
    return sparse_dot(embed_tfidf(query, space), embed_tfidf(doc, space))


def sparse_dot(a: dict[int, float], b: dict[int, float]) -> float:
    if len(a) > len(b):
        a, b = b, a
    return sum(weight * b[index] for index, weight in a.items() if index in b)


def _f1(overlap: float, candidate_total: int, reference_total: int) -> float:
    if overlap == 0 or candidate_total == 0 or reference_total == 0:
        return 0.0
    precision = overlap / candidate_total
    recall = overlap / reference_total
    return 2.0 * precision * recall / (precision + recall)


def rouge_n(candidate: TokenList, reference: TokenList, n: int) -> float:
    """Clipped n-gram overlap F1 for n in {1, 2}."""
    if n not in (1, 2):
        raise ValueError(f"rouge_n supports n in {{1, 2}}, got {n}")
    candidate_grams = ngrams(candidate, n)
    reference_grams = ngrams(reference, n)
    overlap = sum((candidate_grams & reference_grams).values())
    return _f1(overlap, sum(candidate_grams.values()), sum(reference_grams.values()))


def rouge_l(candidate: TokenList, reference: TokenList) -> float:
    """Token-level longest-common-subsequence F1."""
    return _f1(lcs_length(candidate, reference), len(candidate), len(reference))


def lcs_length(a: TokenList, b: TokenList) -> int:
    """Classic two-row LCS dynamic program."""
    if not a or not b:
        return 0
    if len(a) < len(b):
        a, b = b, a
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        append = current.append
        for j, other in enumerate(b, start=1):
            if token == other:
                append(previous[j - 1] + 1)
            else:
                left = current[j - 1]
                up = previous[j]
                append(left if left >= up else up)
        previous = current
    return previous[-1]


def rouge_scores(candidate_text: str, reference_text: str) -> RougeScores:
    """ROUGE-1/2/L between two whole texts under the shared tokenizer."""
    candidate = tokenize(candidate_text)
    reference = tokenize(reference_text)
    return RougeScores(
        r1=rouge_n(candidate, reference, 1),
        r2=rouge_n(candidate, reference, 2),
        rl=rouge_l(candidate, reference),
    )


def corpus_rouge(candidates: Sequence[str], references: Sequence[str]) -> RougeScores:
    """Unweighted mean of per-pair ROUGE scores on whole-summary token lists."""
    if len(candidates) != len(references):
        raise DataError(
            f"candidate/reference length mismatch: {len(candidates)} vs {len(references)}"
        )
    if not candidates:
        raise DataError("cannot average ROUGE over zero pairs")
    per_pair = [rouge_scores(c, r) for c, r in zip(candidates, references)]
    n = len(per_pair)
    return RougeScores(
        r1=sum(s.r1 for s in per_pair) / n,
        r2=sum(s.r2 for s in per_pair) / n,
        rl=sum(s.rl for s in per_pair) / n,
    )
