"""Corpus data model, jsonl/csv readers and writers, and corpus statistics.

The on-disk jsonl schema is one object per line with keys exactly
``id``, ``article``, ``gold_summary``, ``model_summaries``.  The csv schema
is a header row ``id,article,gold_summary`` followed by one ``model:<name>``
column per model, in lexicographic name order.  csv is rectangular: every
row carries every model column, and an empty cell reads back as an empty
summary (a refusal), so per-record absence of a model is a jsonl-only
distinction.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .errors import DataError, FileError
from .textproc import SentenceList

_JSONL_KEYS = ("id", "article", "gold_summary", "model_summaries")
_CSV_FIXED = ("id", "article", "gold_summary")
_MODEL_PREFIX = "model:"

CORPUS_FORMATS = ("jsonl", "csv")


@dataclass(frozen=True)
class CorpusRecord:
    """One article with its gold summary and zero or more model summaries."""

    id: str
    article: str
    gold_summary: str
    model_summaries: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.id:
            raise DataError("record id must be non-empty")
        if not self.article.strip():
            raise DataError(f"record {self.id!r} has an empty article")
        if not self.gold_summary.strip():
            raise DataError(f"record {self.id!r} has an empty gold summary")
        object.__setattr__(self, "model_summaries", dict(self.model_summaries))

    def with_model_summary(self, model_name: str, text: str) -> "CorpusRecord":
        summaries = dict(self.model_summaries)
        summaries[model_name] = text
        return CorpusRecord(self.id, self.article, self.gold_summary, summaries)


@dataclass(frozen=True)
class CorpusStats:
    num_articles: int
    avg_sentences_per_article: float
    total_summary_sentences: int
    avg_sentences_per_summary: float


def detect_format(path: str | Path) -> str:
    suffix = Path(path).suffix.lower().lstrip(".")
    if suffix in CORPUS_FORMATS:
        return suffix
    raise DataError(
        f"cannot infer corpus format from {path!r}; expected a .jsonl or .csv file"
    )


def load_corpus(path: str | Path, format: str = "jsonl") -> list[CorpusRecord]:
    """Read a corpus file, preserving record order and rejecting duplicate ids."""
    path = Path(path)
    if format not in CORPUS_FORMATS:
        raise DataError(f"unknown corpus format {format!r}")
    try:
        # newline="" keeps carriage returns intact for the csv parser
        with path.open("r", encoding="utf-8", newline="") as handle:
            text = handle.read()
    except OSError as exc:
        raise FileError(f"cannot read corpus {path}: {exc}") from exc

    if format == "jsonl":
        records = _parse_jsonl(text, path)
    else:
        records = _parse_csv(text, path)

    seen: set[str] = set()
    for record in records:
        if record.id in seen:
            raise DataError(f"duplicate record id {record.id!r} in {path}")
        seen.add(record.id)
    if not records:
        raise DataError(f"corpus {path} contains no records")
    return records


def _parse_jsonl(text: str, path: Path) -> list[CorpusRecord]:
    records = []
    # split on "\n" only: json escapes every newline-class character inside
    # strings except U+2028/U+2029, which splitlines() would cut on
    for line_number, line in enumerate(text.split("\n"), start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}:{line_number}: invalid JSON: {exc.msg}") from exc
        records.append(_record_from_mapping(raw, f"{path}:{line_number}"))
    return records


def _record_from_mapping(raw: object, where: str) -> CorpusRecord:
    if not isinstance(raw, dict):
        raise DataError(f"{where}: expected a JSON object, got {type(raw).__name__}")
    extra = set(raw) - set(_JSONL_KEYS)
    missing = set(_JSONL_KEYS) - set(raw)
    if extra or missing:
        parts = []
        if missing:
            parts.append(f"missing keys {sorted(missing)}")
        if extra:
            parts.append(f"unexpected keys {sorted(extra)}")
        raise DataError(f"{where}: {'; '.join(parts)}")
    summaries = raw["model_summaries"]
    if not isinstance(summaries, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in summaries.items()
    ):
        raise DataError(f"{where}: model_summaries must map model names to strings")
    if not all(isinstance(raw[key], str) for key in _CSV_FIXED):
        raise DataError(f"{where}: id, article, and gold_summary must be strings")
    try:
        return CorpusRecord(raw["id"], raw["article"], raw["gold_summary"], summaries)
    except DataError as exc:
        raise DataError(f"{where}: {exc}") from exc


def _parse_csv(text: str, path: Path) -> list[CorpusRecord]:
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = next(reader)
    except StopIteration:
        return []
    if tuple(header[: len(_CSV_FIXED)]) != _CSV_FIXED:
        raise DataError(
            f"{path}: csv header must start with {','.join(_CSV_FIXED)}, got {header!r}"
        )
    model_names = []
    for column in header[len(_CSV_FIXED) :]:
        if not column.startswith(_MODEL_PREFIX) or column == _MODEL_PREFIX:
            raise DataError(f"{path}: unexpected csv column {column!r}")
        model_names.append(column[len(_MODEL_PREFIX) :])

    records = []
    for row in reader:
        if not row or all(cell == "" for cell in row):
            continue
        where = f"{path}:row {reader.line_num}"
        if len(row) != len(header):
            raise DataError(
                f"{where}: expected {len(header)} cells, got {len(row)}"
            )
        summaries = dict(zip(model_names, row[len(_CSV_FIXED) :]))
        try:
            records.append(CorpusRecord(row[0], row[1], row[2], summaries))
        except DataError as exc:
            raise DataError(f"{where}: {exc}") from exc
    return records


def save_corpus(
    records: Sequence[CorpusRecord], path: str | Path, format: str = "jsonl"
) -> None:
    """Write records to disk with deterministic field and column order."""
    if not records:
        raise DataError("refusing to save an empty corpus")
    if format not in CORPUS_FORMATS:
        raise DataError(f"unknown corpus format {format!r}")
    path = Path(path)
    try:
        if format == "jsonl":
            _write_jsonl(records, path)
        else:
            _write_csv(records, path)
    except OSError as exc:
        raise FileError(f"cannot write corpus {path}: {exc}") from exc


def _write_jsonl(records: Sequence[CorpusRecord], path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for record in records:
            payload = {
                "id": record.id,
                "article": record.article,
                "gold_summary": record.gold_summary,
                "model_summaries": {
                    name: record.model_summaries[name]
                    for name in sorted(record.model_summaries)
                },
            }
            handle.write(json.dumps(payload, ensure_ascii=False) + "\n")


def _write_csv(records: Sequence[CorpusRecord], path: Path) -> None:
    model_names = sorted({name for r in records for name in r.model_summaries})
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(list(_CSV_FIXED) + [_MODEL_PREFIX + name for name in model_names])
        for record in records:
            row = [record.id, record.article, record.gold_summary]
            row.extend(record.model_summaries.get(name, "") for name in model_names)
            if any("\x00" in cell for cell in row):
                raise DataError(
                    f"record {record.id!r} contains a NUL character, which csv "
                    f"cannot represent; use jsonl"
                )
            writer.writerow(row)


def model_names_in(records: Iterable[CorpusRecord]) -> list[str]:
    """All model names appearing anywhere in the corpus, lexicographic."""
    return sorted({name for record in records for name in record.model_summaries})


def corpus_stats(
    records: Sequence[CorpusRecord],
    splitter: Callable[[str], SentenceList],
    summary_source: str = "gold",
) -> CorpusStats:
    """Sentence-count statistics under the given splitter.

    ``summary_source`` is ``gold`` or ``model:<name>``; the latter requires
    every record to carry that model.
    """
    if not records:
        raise DataError("cannot compute statistics for an empty corpus")
    if summary_source == "gold":
        summaries = [record.gold_summary for record in records]
    elif summary_source.startswith(_MODEL_PREFIX):
        name = summary_source[len(_MODEL_PREFIX) :]
        missing = [r.id for r in records if name not in r.model_summaries]
        if missing:
            raise DataError(
                f"model {name!r} missing from records: {', '.join(missing)}"
            )
        summaries = [record.model_summaries[name] for record in records]
    else:
        raise DataError(
            f"summary source must be 'gold' or 'model:<name>', got {summary_source!r}"
        )

    article_sentences = sum(len(splitter(r.article)) for r in records)
    summary_sentences = sum(len(splitter(s)) for s in summaries)
    n = len(records)
    return CorpusStats(
        num_articles=n,
        avg_sentences_per_article=article_sentences / n,
        total_summary_sentences=summary_sentences,
        avg_sentences_per_summary=summary_sentences / n,
    )
