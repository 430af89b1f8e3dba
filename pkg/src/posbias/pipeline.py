"""End-to-end analysis: load, split, map, segment, accumulate, measure.

Per-article work is independent and runs on a worker pool when requested;
results merge in input order, so outputs are bit-identical for any worker
count.  Model summaries that are empty after trimming count as refusals
and are excluded from that model's mapping and ROUGE statistics.
"""

from __future__ import annotations

import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .biasmetrics import (
    BiasReport,
    CorrelationResult,
    correlate_models,
    lead_bias_fraction,
    wasserstein1,
)
from .corpus import CorpusRecord, model_names_in
from .errors import ConfigError, DataError
from .posmap import (
    MappingConfig,
    SegmentationPlan,
    SentenceMapping,
    accumulate_distribution,
    map_summary,
    segment_article,
)
from .report import AnalysisBundle
from .simmetrics import RougeScores, rouge_scores
from .textproc import split_sentences

SHORT_ARTICLE_POLICIES = ("skip", "error")


@dataclass(frozen=True)
class AnalyzeConfig:
    """Configuration for one analysis run."""

    corpus_name: str = "corpus"
    k: int = 10
    phi: str = "tfidf"
    top_n: int = 1
    k_prime: int = 3
    short_article_policy: str = "skip"
    bin_positions: str = "normalized"
    aggregation: str = "pooled"
    models: tuple[str, ...] | None = None
    correlation_metrics: tuple[str, ...] = ("r1", "r2", "rl")
    workers: int = 1
    seed: int = 0
    extra_abbreviations: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.k_prime < 1:
            raise ConfigError(f"k' must be >= 1, got {self.k_prime}")
        if self.workers < 1:
            raise ConfigError(f"worker count must be >= 1, got {self.workers}")
        if self.short_article_policy not in SHORT_ARTICLE_POLICIES:
            raise ConfigError(
                f"short-article policy must be one of {SHORT_ARTICLE_POLICIES}, "
                f"got {self.short_article_policy!r}"
            )
        # Delegates phi/top_n validation so bad values fail at config time.
        MappingConfig(phi=self.phi, top_n=self.top_n)


@dataclass(frozen=True)
class _RecordJob:
    record: CorpusRecord
    model_names: tuple[str, ...]
    k: int
    phi: str
    top_n: int
    extra_abbreviations: tuple[str, ...]


@dataclass(frozen=True)
class _RecordOutcome:
    record_id: str
    skipped_short: bool
    n_sentences: int
    gold_mapping: SentenceMapping | None
    model_results: dict[str, tuple[SentenceMapping, RougeScores]] = field(
        default_factory=dict
    )


def _process_record(job: _RecordJob) -> _RecordOutcome:
    record = job.record
    article = split_sentences(record.article, job.extra_abbreviations)
    n = len(article)
    if n < job.k:
        return _RecordOutcome(
            record_id=record.id, skipped_short=True, n_sentences=n, gold_mapping=None
        )
    config = MappingConfig(phi=job.phi, top_n=job.top_n)
    gold_mapping = map_summary(
        split_sentences(record.gold_summary, job.extra_abbreviations), article, config
    )
    model_results = {}
    for name in job.model_names:
        text = record.model_summaries.get(name)
        if text is None or not text.strip():
            continue
        mapping = map_summary(
            split_sentences(text, job.extra_abbreviations), article, config
        )
        model_results[name] = (mapping, rouge_scores(text, record.gold_summary))
    return _RecordOutcome(
        record_id=record.id,
        skipped_short=False,
        n_sentences=n,
        gold_mapping=gold_mapping,
        model_results=model_results,
    )


def _run_jobs(jobs: list[_RecordJob], workers: int) -> list[_RecordOutcome]:
    if workers <= 1 or len(jobs) < 2:
        return [_process_record(job) for job in jobs]
    chunksize = max(1, len(jobs) // (workers * 8))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_process_record, jobs, chunksize=chunksize))


def _mean_rouge(scores: list[RougeScores]) -> RougeScores:
    n = len(scores)
    return RougeScores(
        r1=sum(s.r1 for s in scores) / n,
        r2=sum(s.r2 for s in scores) / n,
        rl=sum(s.rl for s in scores) / n,
    )


def run_analysis(
    records: list[CorpusRecord], config: AnalyzeConfig
) -> AnalysisBundle:
    """Measure positional distributions and bias for gold and every model."""
    if not records:
        raise DataError("cannot analyze an empty corpus")
    available = model_names_in(records)
    if config.models is None:
        model_names = tuple(available)
    else:
        unknown = sorted(set(config.models) - set(available))
        if unknown:
            raise DataError(
                f"models not present in corpus: {', '.join(unknown)}"
            )
        model_names = tuple(sorted(set(config.models)))

    jobs = [
        _RecordJob(
            record=record,
            model_names=model_names,
            k=config.k,
            phi=config.phi,
            top_n=config.top_n,
            extra_abbreviations=config.extra_abbreviations,
        )
        for record in records
    ]
    outcomes = _run_jobs(jobs, config.workers)

    skipped = [outcome for outcome in outcomes if outcome.skipped_short]
    if skipped and config.short_article_policy == "error":
        sample = ", ".join(o.record_id for o in skipped[:5])
        raise DataError(
            f"{len(skipped)} article(s) have fewer than k={config.k} sentences "
            f"(e.g. {sample})"
        )
    usable = [outcome for outcome in outcomes if not outcome.skipped_short]
    if not usable:
        raise DataError(
            f"all articles skipped: every article has fewer than k={config.k} sentences"
        )

    plans: dict[int, SegmentationPlan] = {}

    def plan_for(n: int) -> SegmentationPlan:
        if n not in plans:
            plans[n] = segment_article(n, config.k)
        return plans[n]

    gold_pairs = [(o.gold_mapping, plan_for(o.n_sentences)) for o in usable]
    gold_distribution, gold_unmapped = accumulate_distribution(
        gold_pairs, config.k, config.bin_positions, config.aggregation
    )
    gold_lead = lead_bias_fraction([m for m, _ in gold_pairs], config.k_prime)

    reports = []
    for name in model_names:
        pairs = []
        scores = []
        for outcome in usable:
            result = outcome.model_results.get(name)
            if result is None:
                continue
            mapping, rouge = result
            pairs.append((mapping, plan_for(outcome.n_sentences)))
            scores.append(rouge)
        if not pairs:
            raise DataError(f"no usable summaries for model {name!r}")
        distribution, unmapped = accumulate_distribution(
            pairs, config.k, config.bin_positions, config.aggregation
        )
        reports.append(
            BiasReport(
                model_name=name,
                wasserstein=wasserstein1(gold_distribution, distribution),
                rouge=_mean_rouge(scores),
                lead_bias_fraction=lead_bias_fraction(
                    [m for m, _ in pairs], config.k_prime
                ),
                unmapped_fraction=unmapped,
                skipped_short_articles=len(skipped),
                gold_distribution=gold_distribution,
                model_distribution=distribution,
            )
        )

    correlations: list[tuple[str, CorrelationResult]] = []
    if len(reports) >= 3:
        for metric in config.correlation_metrics:
            try:
                correlations.append((metric, correlate_models(reports, metric)))
            except DataError as exc:
                print(
                    f"posbias: correlation for {metric} omitted: {exc}",
                    file=sys.stderr,
                )

    return AnalysisBundle(
        corpus_name=config.corpus_name,
        k=config.k,
        phi=config.phi,
        top_n=config.top_n,
        k_prime=config.k_prime,
        bin_positions=config.bin_positions,
        aggregation=config.aggregation,
        seed=config.seed,
        gold_distribution=gold_distribution,
        gold_lead_bias_fraction=gold_lead,
        gold_unmapped_fraction=gold_unmapped,
        skipped_short_articles=len(skipped),
        models=tuple(reports),
        correlations=tuple(correlations),
    )


def write_outputs(bundle: AnalysisBundle, out_dir: str | Path) -> list[str]:
    """Emit json, csv, and svg outputs; returns the filenames written."""
    from .report import emit_csv, emit_json, render_distribution_chart, render_bias_bars

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    emit_json(bundle, out_dir / "analysis.json")
    emit_csv(bundle, out_dir)
    render_distribution_chart(bundle, out_dir / "distributions.svg")
    written = [
        "analysis.json",
        "distributions.csv",
        "metrics.csv",
        "correlations.csv",
        "distributions.svg",
    ]
    if bundle.models:
        render_bias_bars(bundle, out_dir / "bias_bars.svg")
        written.append("bias_bars.svg")
    return written
