"""Synthetic corpora with exactly known positional ground truth.

Each generated article sentence carries its own disjoint token vocabulary
and every summary sentence is a verbatim copy of one article sentence, so
the mapping stage recovers the allocated segment for every summary sentence
with similarity 1 and zero ambiguity.  The measured positional distribution
therefore equals the allocation exactly, which makes these corpora an
end-to-end oracle for the whole pipeline.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import CorpusRecord
from .errors import ConfigError, FileError
from .posmap import SegmentationPlan, segment_article

ALLOCATION_MODES = ("deterministic_largest_remainder", "seeded_random")
_TOKENS_PER_SENTENCE = 5


@dataclass(frozen=True)
class SynthSpec:
    """Generation parameters plus the target positional ground truth."""

    num_articles: int
    sentences_per_article: int
    k: int
    gold_target: tuple[float, ...]
    model_targets: Mapping[str, tuple[float, ...]]
    summary_sentences_per_article: int
    allocation: str = "deterministic_largest_remainder"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_articles < 1:
            raise ConfigError("num_articles must be >= 1")
        if self.sentences_per_article < 1:
            raise ConfigError("sentences_per_article must be >= 1")
        if not 1 <= self.k <= self.sentences_per_article:
            raise ConfigError(
                f"k must satisfy 1 <= k <= sentences_per_article, got k={self.k}"
            )
        if self.summary_sentences_per_article < 1:
            raise ConfigError("summary_sentences_per_article must be >= 1")
        if self.allocation not in ALLOCATION_MODES:
            raise ConfigError(
                f"allocation must be one of {ALLOCATION_MODES}, got {self.allocation!r}"
            )
        _check_target("gold_target", self.gold_target, self.k)
        for name, target in self.model_targets.items():
            if not name:
                raise ConfigError("model names must be non-empty")
            _check_target(f"model_target:{name}", target, self.k)
        object.__setattr__(self, "model_targets", dict(self.model_targets))


def _check_target(name: str, target: Sequence[float], k: int) -> None:
    if len(target) != k:
        raise ConfigError(f"{name} must have length k={k}, got {len(target)}")
    if any(value < 0 for value in target):
        raise ConfigError(f"{name} entries must be non-negative")
    if abs(sum(target) - 1.0) > 1e-12:
        raise ConfigError(f"{name} must sum to 1, got {sum(target)!r}")


def largest_remainder(total: int, weights: Sequence[float]) -> list[int]:
    """Round total * weights to integers preserving the total.

    Floors first, then hands out the leftover units by descending
    fractional remainder, ties going to the lower index.
    """
    raw = [total * w for w in weights]
    counts = [int(value) for value in raw]
    leftover = total - sum(counts)
    order = sorted(
        range(len(weights)), key=lambda i: (-(raw[i] - counts[i]), i)
    )
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def _article_sentence(article: int, sentence: int) -> str:
    tokens = [f"w{article}x{sentence}y{t}" for t in range(_TOKENS_PER_SENTENCE)]
    tokens[0] = tokens[0].capitalize()
    return " ".join(tokens) + "."


def _subseed(seed: int, series: str, article: int) -> int:
    digest = hashlib.sha256(f"{seed}|{series}|{article}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _sentence_for_segment(
    plan: SegmentationPlan, segment: int, occurrence: int
) -> int:
    lo = int(plan.lows[segment])
    hi = int(plan.highs[segment])
    return lo + occurrence % (hi - lo + 1)


def generate_synthetic(spec: SynthSpec) -> list[CorpusRecord]:
    """Build a corpus whose summaries copy article sentences drawn from
    segments according to the spec's target vectors."""
    plan = segment_article(spec.sentences_per_article, spec.k)
    series: list[tuple[str, tuple[float, ...]]] = [("gold", spec.gold_target)]
    series.extend((name, spec.model_targets[name]) for name in sorted(spec.model_targets))

    # series name -> per-article list of 0-based segment assignments
    allocations: dict[str, list[list[int]]] = {}
    if spec.allocation == "deterministic_largest_remainder":
        per_article = spec.summary_sentences_per_article
        total = spec.num_articles * per_article
        for name, target in series:
            counts = largest_remainder(total, target)
            labels = [j for j in range(spec.k) for _ in range(counts[j])]
            allocations[name] = [
                labels[a * per_article : (a + 1) * per_article]
                for a in range(spec.num_articles)
            ]
    else:
        segments = list(range(spec.k))
        for name, target in series:
            per_article_assignments = []
            for a in range(spec.num_articles):
                rng = random.Random(_subseed(spec.seed, name, a))
                per_article_assignments.append(
                    rng.choices(segments, weights=target, k=spec.summary_sentences_per_article)
                )
            allocations[name] = per_article_assignments

    records = []
    width = max(5, len(str(spec.num_articles - 1)))
    for a in range(spec.num_articles):
        sentences = [
            _article_sentence(a, i) for i in range(spec.sentences_per_article)
        ]
        summaries: dict[str, str] = {}
        for name, _ in series:
            occurrences: dict[int, int] = {}
            chosen = []
            for segment in allocations[name][a]:
                occurrence = occurrences.get(segment, 0)
                occurrences[segment] = occurrence + 1
                chosen.append(sentences[_sentence_for_segment(plan, segment, occurrence)])
            summaries[name] = " ".join(chosen)
        model_summaries = {
            name: text for name, text in summaries.items() if name != "gold"
        }
        records.append(
            CorpusRecord(
                id=f"synth-{a:0{width}d}",
                article=" ".join(sentences),
                gold_summary=summaries["gold"],
                model_summaries=model_summaries,
            )
        )
    return records


_INT_FIELDS = {
    "num_articles",
    "sentences_per_article",
    "k",
    "summary_sentences_per_article",
    "seed",
}
_REQUIRED_FIELDS = {
    "num_articles",
    "sentences_per_article",
    "k",
    "gold_target",
    "summary_sentences_per_article",
}


def parse_spec_file(path: str | Path) -> SynthSpec:
    """Read a key = value spec document; vectors are comma-separated reals.

    Model targets use keys of the form ``model_target:<name>``.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read spec {path}: {exc}") from exc

    values: dict[str, str] = {}
    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{line_number}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        values[key.strip()] = value.strip()

    known = _INT_FIELDS | {"gold_target", "allocation"}
    for key in values:
        if key not in known and not key.startswith("model_target:"):
            raise ConfigError(f"unknown spec field {key!r}")
    missing = _REQUIRED_FIELDS - set(values)
    if missing:
        raise ConfigError(f"spec missing required fields: {', '.join(sorted(missing))}")

    def parse_int(field_name: str, default: int | None = None) -> int:
        if field_name not in values:
            return default  # type: ignore[return-value]
        try:
            return int(values[field_name])
        except ValueError as exc:
            raise ConfigError(f"field {field_name} must be an integer") from exc

    def parse_vector(field_name: str, raw: str) -> tuple[float, ...]:
        try:
            return tuple(float(part) for part in raw.split(","))
        except ValueError as exc:
            raise ConfigError(
                f"field {field_name} must be comma-separated reals"
            ) from exc

    model_targets = {
        key[len("model_target:") :]: parse_vector(key, raw)
        for key, raw in values.items()
        if key.startswith("model_target:")
    }
    return SynthSpec(
        num_articles=parse_int("num_articles"),
        sentences_per_article=parse_int("sentences_per_article"),
        k=parse_int("k"),
        gold_target=parse_vector("gold_target", values["gold_target"]),
        model_targets=model_targets,
        summary_sentences_per_article=parse_int("summary_sentences_per_article"),
        allocation=values.get("allocation", "deterministic_largest_remainder"),
        seed=parse_int("seed", 0),
    )
