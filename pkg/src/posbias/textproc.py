"""Sentence splitting, tokenization, and n-gram extraction.

Every similarity and mapping computation in the package goes through the
same splitter and tokenizer so that downstream comparisons isolate the
weighting scheme instead of the preprocessing.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

TokenList = list[str]

# Sentence-final abbreviations that must not trigger a split when followed
# by whitespace and a capitalized word.  Entries are lowercase and keep
# their trailing period.  Deliberately omits words that are common verbs
# or nouns in sentence-final position (sat, sun, wed, no, ...).
DEFAULT_ABBREVIATIONS = frozenset(
    {
        "mr.", "mrs.", "ms.", "dr.", "prof.", "rev.", "hon.", "fr.",
        "gen.", "sen.", "rep.", "gov.", "pres.", "sec.", "amb.",
        "capt.", "col.", "cmdr.", "adm.", "sgt.", "cpl.", "lt.", "maj.", "brig.",
        "jr.", "sr.", "messrs.", "mme.", "mlle.",
        "st.", "mt.", "ft.", "ave.", "blvd.", "rd.",
        "dept.", "univ.", "assn.", "bros.", "inc.", "ltd.", "co.", "corp.",
        "vs.", "etc.", "e.g.", "i.e.", "eg.", "ie.", "cf.", "al.",
        "fig.", "figs.", "vol.", "vols.", "ch.", "pp.", "approx.",
        "jan.", "feb.", "mar.", "apr.", "aug.", "sept.", "oct.", "nov.", "dec.",
        "u.s.", "u.k.", "u.n.", "u.s.a.", "d.c.", "e.u.",
        "a.m.", "p.m.", "b.c.", "a.d.", "b.c.e.", "c.e.",
        "ph.d.", "m.d.", "b.a.", "m.a.", "b.sc.", "m.sc.", "d.phil.",
    }
)

# Terminal punctuation run, optional closing quotes/brackets, then the
# whitespace that a boundary consumes.
_BOUNDARY = re.compile(r"([.!?]+)([\"'”’)\]]*)(\s+)")
# The next sentence must open with (optionally quoted) uppercase or digit.
_NEXT_START = re.compile(r"[\"'“‘(\[]*[A-Z0-9]")
_WORD_BEFORE = re.compile(r"(\S+)$")
# A single letter with a period reads as an initial ("George W. Bush").
_INITIAL = re.compile(r"^[a-z]\.$")
_TOKEN = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class SentenceList:
    """An ordered sequence of non-empty sentences from one text."""

    sentences: tuple[str, ...]

    @property
    def source_length(self) -> int:
        return len(self.sentences)

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[str]:
        return iter(self.sentences)

    def __getitem__(self, index: int) -> str:
        return self.sentences[index]


def normalize_abbreviations(entries: Iterable[str]) -> frozenset[str]:
    """Lowercase extra abbreviation entries and ensure a trailing period."""
    out = set()
    for raw in entries:
        word = raw.strip().lower()
        if not word:
            continue
        if not word.endswith("."):
            word += "."
        out.add(word)
    return frozenset(out)


def split_sentences(text: str, extra_abbreviations: Iterable[str] = ()) -> SentenceList:
    """Split raw text into sentences with a deterministic rule-based splitter.

    A boundary is a run of terminal punctuation (``. ! ?``), optionally
    followed by closing quotes or brackets, then whitespace, where the next
    character opens a sentence (uppercase, digit, or opening quote) and the
    word before a lone period is not a known abbreviation or initial.  A
    trailing fragment without terminal punctuation becomes a final sentence.
    """
    if not text or not text.strip():
        return SentenceList(())
    guard = DEFAULT_ABBREVIATIONS
    if extra_abbreviations:
        guard = guard | normalize_abbreviations(extra_abbreviations)

    sentences: list[str] = []
    start = 0
    for match in _BOUNDARY.finditer(text):
        if not _NEXT_START.match(text, match.end()):
            continue
        if match.group(1) == "." and _is_abbreviation(text, match.end(1), guard):
            continue
        sentence = text[start : match.end(2)].strip()
        if sentence:
            sentences.append(sentence)
        start = match.end()
    tail = text[start:].strip()
    if tail:
        sentences.append(tail)
    return SentenceList(tuple(sentences))


def _is_abbreviation(text: str, period_end: int, guard: frozenset[str]) -> bool:
    match = _WORD_BEFORE.search(text, 0, period_end)
    if match is None:
        return False
    word = match.group(1).lstrip("\"'“‘([").lower()
    return word in guard or bool(_INITIAL.match(word))


def tokenize(sentence: str) -> TokenList:
    """Lowercase and split on non-alphanumeric runs; no stemming or stopwords."""
    return _TOKEN.findall(sentence.lower())


def ngrams(tokens: TokenList, n: int) -> Counter[tuple[str, ...]]:
    """All contiguous n-token windows with multiplicity.

    Fewer than ``n`` tokens yields an empty multiset.
    """
    if n < 1:
        raise ValueError(f"n-gram order must be >= 1, got {n}")
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))
