"""Command-line front end: analyze, generate, synth, rouge, stats.

Exit statuses: 0 success, 1 data error, 2 config error, 3 i/o error,
4 remote error.  Categorized one-line messages go to standard error;
stack traces never do.
"""

from __future__ import annotations

import argparse
import functools
import json
import os
import sys
from pathlib import Path

from .corpus import (
    corpus_stats,
    detect_format,
    load_corpus,
    save_corpus,
)
from .errors import ConfigError, FileError, PosbiasError
from .llmclient import (
    RetryPolicy,
    builtin_template,
    generate_summaries,
    load_template_file,
)
from .pipeline import AnalyzeConfig, run_analysis, write_outputs
from .simmetrics import corpus_rouge
from .synth import generate_synthetic, parse_spec_file
from .textproc import split_sentences

API_KEY_ENV = "POSBIAS_API_KEY"


def _read_lines(path: str, what: str) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise FileError(f"cannot read {what} {path}: {exc}") from exc


def _resolve_format(path: str, explicit: str | None) -> str:
    return explicit if explicit else detect_format(path)


def _abbreviations(args: argparse.Namespace) -> tuple[str, ...]:
    if not getattr(args, "abbrev_file", None):
        return ()
    return tuple(_read_lines(args.abbrev_file, "abbreviation list"))


def cmd_analyze(args: argparse.Namespace) -> int:
    records = load_corpus(args.input, _resolve_format(args.input, args.format))
    models = tuple(args.models.split(",")) if args.models else None
    metrics = ("r1", "r2", "rl") if args.correlation_metric == "all" else (
        args.correlation_metric,
    )
    config = AnalyzeConfig(
        corpus_name=args.corpus_name or Path(args.input).stem,
        k=args.k,
        phi=args.phi,
        top_n=args.top_n,
        k_prime=args.k_prime,
        short_article_policy=args.short_article_policy,
        bin_positions=args.bin_positions,
        aggregation=args.aggregation,
        models=models,
        correlation_metrics=metrics,
        workers=args.workers,
        seed=args.seed,
        extra_abbreviations=_abbreviations(args),
    )
    bundle = run_analysis(records, config)
    if bundle.skipped_short_articles:
        print(
            f"posbias: skipped {bundle.skipped_short_articles} article(s) with "
            f"fewer than k={config.k} sentences",
            file=sys.stderr,
        )
    written = write_outputs(bundle, args.out_dir)
    print(f"wrote {', '.join(written)} to {args.out_dir}")
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    if bool(args.template) == bool(args.template_file):
        raise ConfigError("choose exactly one of --template or --template-file")
    template = (
        load_template_file(args.template_file)
        if args.template_file
        else builtin_template(args.template)
    )
    in_format = _resolve_format(args.input, args.format)
    records = load_corpus(args.input, in_format)
    token = os.environ.get(API_KEY_ENV, "")
    new_records, stats = generate_summaries(
        records,
        args.model_name,
        template,
        args.endpoint,
        token,
        required_sentences=args.required_sentences,
        seed=args.seed,
        temperature=args.temperature,
        max_in_flight=args.max_in_flight,
        retry_policy=RetryPolicy(
            max_attempts=args.max_attempts, backoff_base=args.backoff_base
        ),
        timeout=args.timeout,
    )
    out_path = args.output or args.input
    try:
        out_format = detect_format(out_path)
    except PosbiasError:
        out_format = in_format
    save_corpus(new_records, out_path, out_format)
    print(stats.compliance_line())
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    spec = parse_spec_file(args.spec)
    records = generate_synthetic(spec)
    try:
        out_format = detect_format(args.out)
    except PosbiasError:
        out_format = "jsonl"
    save_corpus(records, args.out, out_format)
    sidecar = Path(args.out).with_suffix(".targets.json")
    payload = {
        "k": spec.k,
        "allocation": spec.allocation,
        "seed": spec.seed,
        "gold_target": list(spec.gold_target),
        "model_targets": {
            name: list(target) for name, target in sorted(spec.model_targets.items())
        },
    }
    try:
        sidecar.write_text(
            json.dumps(payload, indent=2, sort_keys=False) + "\n", encoding="utf-8"
        )
    except OSError as exc:
        raise FileError(f"cannot write sidecar {sidecar}: {exc}") from exc
    print(f"wrote {args.out} and {sidecar}")
    return 0


def cmd_rouge(args: argparse.Namespace) -> int:
    candidates = _read_lines(args.candidates, "candidates file")
    references = _read_lines(args.references, "references file")
    scores = corpus_rouge(candidates, references)
    print(f"{scores.r1:.4f}\t{scores.r2:.4f}\t{scores.rl:.4f}")
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    records = load_corpus(args.input, _resolve_format(args.input, args.format))
    splitter = functools.partial(
        split_sentences, extra_abbreviations=_abbreviations(args)
    )
    stats = corpus_stats(records, splitter, args.summary_source)
    print(f"num_articles: {stats.num_articles}")
    print(f"avg_sentences_per_article: {stats.avg_sentences_per_article:.4f}")
    print(f"total_summary_sentences: {stats.total_summary_sentences}")
    print(f"avg_sentences_per_summary: {stats.avg_sentences_per_summary:.4f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="posbias",
        description=(
            "Quantify position bias in abstractive summarization by mapping "
            "summary sentences onto article segments and comparing gold and "
            "model positional distributions."
        ),
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workers", type=int, default=1, help="parallel worker count")
    common.add_argument("--seed", type=int, default=0, help="random seed")
    common.add_argument("--out-dir", default="out", help="output directory")

    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser(
        "analyze", parents=[common], help="measure position bias on a corpus"
    )
    analyze.add_argument("--input", required=True, help="corpus file (.jsonl or .csv)")
    analyze.add_argument("--format", choices=("jsonl", "csv"), default=None)
    analyze.add_argument("--corpus-name", default=None)
    analyze.add_argument("--k", type=int, default=10, help="segment count")
    analyze.add_argument("--phi", choices=("tfidf", "rouge1"), default="tfidf")
    analyze.add_argument("--top-n", type=int, choices=(1, 2, 3), default=1)
    analyze.add_argument("--k-prime", type=int, default=3, help="lead-bias cutoff")
    analyze.add_argument(
        "--short-article-policy", choices=("skip", "error"), default="skip"
    )
    analyze.add_argument(
        "--bin-positions", choices=("normalized", "index"), default="normalized"
    )
    analyze.add_argument(
        "--aggregation", choices=("pooled", "averaged"), default="pooled"
    )
    analyze.add_argument(
        "--models", default=None, help="comma-separated subset of model names"
    )
    analyze.add_argument(
        "--correlation-metric", choices=("r1", "r2", "rl", "all"), default="all"
    )
    analyze.add_argument("--abbrev-file", default=None)
    analyze.set_defaults(func=cmd_analyze)

    generate = sub.add_parser(
        "generate", parents=[common], help="generate model summaries over HTTP"
    )
    generate.add_argument("--input", required=True)
    generate.add_argument("--output", default=None, help="defaults to --input")
    generate.add_argument("--format", choices=("jsonl", "csv"), default=None)
    generate.add_argument("--endpoint", required=True, help="chat-completion URL")
    generate.add_argument("--model-name", required=True)
    generate.add_argument(
        "--template", default=None, help="built-in template name (e.g. xsum, cnndm)"
    )
    generate.add_argument("--template-file", default=None, help="JSON template file")
    generate.add_argument("--required-sentences", type=int, default=None)
    generate.add_argument("--temperature", type=float, default=0.0)
    generate.add_argument("--max-in-flight", type=int, default=4)
    generate.add_argument("--max-attempts", type=int, default=3)
    generate.add_argument("--backoff-base", type=float, default=0.5)
    generate.add_argument("--timeout", type=float, default=60.0)
    generate.set_defaults(func=cmd_generate)

    synth = sub.add_parser(
        "synth", parents=[common], help="generate a synthetic oracle corpus"
    )
    synth.add_argument("--spec", required=True, help="key = value spec file")
    synth.add_argument("--out", required=True, help="corpus output path")
    synth.set_defaults(func=cmd_synth)

    rouge = sub.add_parser(
        "rouge", parents=[common], help="corpus ROUGE between two line files"
    )
    rouge.add_argument("--candidates", required=True)
    rouge.add_argument("--references", required=True)
    rouge.set_defaults(func=cmd_rouge)

    stats = sub.add_parser(
        "stats", parents=[common], help="sentence-count statistics for a corpus"
    )
    stats.add_argument("--input", required=True)
    stats.add_argument("--format", choices=("jsonl", "csv"), default=None)
    stats.add_argument(
        "--summary-source", default="gold", help="'gold' or 'model:<name>'"
    )
    stats.add_argument("--abbrev-file", default=None)
    stats.set_defaults(func=cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PosbiasError as exc:
        print(f"posbias: {exc.category} error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
