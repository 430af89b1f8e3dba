"""posbias: position-bias measurement for abstractive summarization.

Maps summary sentences back to the article sentences they derive from,
bins the mapped sentences into near-equal article segments, and compares
gold and model positional distributions with the Wasserstein-1 distance,
alongside ROUGE scoring, lead-bias fractions, and rank correlations.
"""

from .biasmetrics import (
    BiasReport,
    CorrelationResult,
    correlate_models,
    lead_bias_fraction,
    spearman,
    wasserstein1,
)
from .corpus import (
    CorpusRecord,
    CorpusStats,
    corpus_stats,
    load_corpus,
    save_corpus,
)
from .errors import ConfigError, DataError, FileError, PosbiasError, RemoteError
from .llmclient import (
    BUILTIN_TEMPLATES,
    GenerationStats,
    PromptTemplate,
    RetryPolicy,
    generate_summaries,
    parse_listed_sentences,
    render_prompt,
    request_summary,
    subsample_sentences,
)
from .pipeline import AnalyzeConfig, run_analysis, write_outputs
from .posmap import (
    MappedSentence,
    MappingConfig,
    PositionalDistribution,
    SegmentationPlan,
    SentenceMapping,
    accumulate_distribution,
    map_summary,
    segment_article,
)
from .report import AnalysisBundle, emit_csv, emit_json
from .simmetrics import (
    RougeScores,
    TfidfSpace,
    build_tfidf_space,
    corpus_rouge,
    rouge_l,
    rouge_n,
    tfidf_cosine,
)
from .synth import SynthSpec, generate_synthetic, parse_spec_file
from .textproc import SentenceList, ngrams, split_sentences, tokenize

__version__ = "0.1.0"

__all__ = [
    "AnalysisBundle",
    "AnalyzeConfig",
    "BUILTIN_TEMPLATES",
    "BiasReport",
    "ConfigError",
    "CorpusRecord",
    "CorpusStats",
    "CorrelationResult",
    "DataError",
    "FileError",
    "GenerationStats",
    "MappedSentence",
    "MappingConfig",
    "PosbiasError",
    "PositionalDistribution",
    "PromptTemplate",
    "RemoteError",
    "RetryPolicy",
    "RougeScores",
    "SegmentationPlan",
    "SentenceList",
    "SentenceMapping",
    "SynthSpec",
    "TfidfSpace",
    "accumulate_distribution",
    "build_tfidf_space",
    "corpus_rouge",
    "corpus_stats",
    "correlate_models",
    "emit_csv",
    "emit_json",
    "generate_summaries",
    "generate_synthetic",
    "lead_bias_fraction",
    "load_corpus",
    "map_summary",
    "ngrams",
    "parse_listed_sentences",
    "parse_spec_file",
    "render_prompt",
    "request_summary",
    "rouge_l",
    "rouge_n",
    "run_analysis",
    "save_corpus",
    "segment_article",
    "spearman",
    "split_sentences",
    "subsample_sentences",
    "tfidf_cosine",
    "tokenize",
    "wasserstein1",
    "write_outputs",
]
