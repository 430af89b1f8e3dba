"""Summary generation against a generic HTTP chat-completion endpoint.

Ships the built-in prompt templates for the four supported corpus styles,
parses list-formatted responses, subsamples over-length outputs uniformly
at random (seeded), and accounts for every response as exactly one of:
refusal, exact compliance, subsampled, or under-length.

Refusal detection is heuristic: an HTTP 451 status, a content-filter error
code in the response body, or an empty response body all count as refusals.
"""

from __future__ import annotations

import hashlib
import json
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import requests

from .corpus import CorpusRecord
from .errors import ConfigError, FileError, RemoteError
from .textproc import split_sentences

LIST_STYLES = ("dash_bulleted", "numbered", "plain")
_PLACEHOLDER = "{Article}"
_REFUSAL_CODES = {"content_filter", "moderation_blocked", "content_policy_violation"}
_TERMINAL_PUNCT = (".", "!", "?", "…")


@dataclass(frozen=True)
class PromptTemplate:
    """A named prompt body with exactly one {Article} placeholder."""

    name: str
    body: str
    required_sentences: int
    list_style: str

    def __post_init__(self) -> None:
        count = self.body.count(_PLACEHOLDER)
        if count != 1:
            raise ConfigError(
                f"template {self.name!r} must contain exactly one {_PLACEHOLDER} "
                f"placeholder, found {count}"
            )
        if self.required_sentences < 1:
            raise ConfigError(
                f"template {self.name!r} requires a positive sentence count"
            )
        if self.list_style not in LIST_STYLES:
            raise ConfigError(
                f"template {self.name!r} has unknown list style {self.list_style!r}"
            )


def _dash_body(sentences: int) -> str:
    if sentences == 1:
        return (
            "For the following article: {Article}. Return a summary comprising of "
            "1 sentence. Write the sentence in a dash bulleted format."
        )
    return (
        "For the following article: {Article}. Return a summary comprising of "
        f"{sentences} sentences. Write each sentence in a dash bulleted format."
    )


def _numbered_body(sentences: int) -> str:
    if sentences == 1:
        return (
            "For the following article: {Article}. Return a summary comprising of "
            "1 sentence. Write the sentence in a numbered list format.\n"
            "For example:\n1. First sentence"
        )
    # The multi-sentence variant keeps its original singular phrasing.
    ordinals = ["First", "Second", "Third", "Fourth", "Fifth"]
    example = "\n".join(
        f"{i}. {ordinals[i - 1]} sentence" for i in range(1, sentences + 1)
    )
    return (
        "For the following article: {Article}. Return a summary comprising of "
        f"{sentences} sentence. Write the sentence in a numbered list format.\n"
        f"For example:\n{example}"
    )


def _plain_body(sentences: int) -> str:
    return (
        f"Generate a {sentences} sentence summary for the given article. "
        "Article: {Article}."
    )


def _builtin(name: str, body: str, sentences: int, style: str) -> PromptTemplate:
    return PromptTemplate(
        name=name, body=body, required_sentences=sentences, list_style=style
    )


BUILTIN_TEMPLATES: dict[str, PromptTemplate] = {}
for _corpus, _count in (("xsum", 1), ("cnndm", 3), ("reddit", 1), ("news", 1)):
    BUILTIN_TEMPLATES[_corpus] = _builtin(
        _corpus, _dash_body(_count), _count, "dash_bulleted"
    )
    BUILTIN_TEMPLATES[f"{_corpus}_numbered"] = _builtin(
        f"{_corpus}_numbered", _numbered_body(_count), _count, "numbered"
    )
    BUILTIN_TEMPLATES[f"{_corpus}_plain"] = _builtin(
        f"{_corpus}_plain", _plain_body(_count), _count, "plain"
    )
del _corpus, _count


def builtin_template(name: str) -> PromptTemplate:
    try:
        return BUILTIN_TEMPLATES[name]
    except KeyError:
        raise ConfigError(
            f"unknown built-in template {name!r}; available: "
            f"{', '.join(sorted(BUILTIN_TEMPLATES))}"
        ) from None


def load_template_file(path: str | Path) -> PromptTemplate:
    """Load a custom template from a JSON document with keys
    name, body, required_sentences, list_style."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise FileError(f"cannot read template {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"template {path} is not valid JSON: {exc.msg}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"template {path} must be a JSON object")
    missing = {"name", "body", "required_sentences", "list_style"} - set(raw)
    if missing:
        raise ConfigError(
            f"template {path} missing keys: {', '.join(sorted(missing))}"
        )
    return PromptTemplate(
        name=str(raw["name"]),
        body=str(raw["body"]),
        required_sentences=int(raw["required_sentences"]),
        list_style=str(raw["list_style"]),
    )


def render_prompt(template: PromptTemplate, article: str) -> str:
    """Substitute the article into the template body verbatim."""
    if not article.strip():
        raise ValueError("article must be non-empty")
    return template.body.replace(_PLACEHOLDER, article)


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_base: float = 0.5
    backoff_cap: float = 8.0

    def delay(self, attempt: int) -> float:
        return min(self.backoff_cap, self.backoff_base * (2 ** (attempt - 1)))


@dataclass(frozen=True)
class SummaryResponse:
    """Response text (None marks a refusal) and the attempts it took."""

    text: str | None
    attempts: int

    @property
    def refused(self) -> bool:
        return self.text is None


def request_summary(
    endpoint: str,
    auth_token: str,
    prompt: str,
    retry_policy: RetryPolicy = RetryPolicy(),
    *,
    model_name: str = "",
    temperature: float = 0.0,
    timeout: float = 60.0,
) -> SummaryResponse:
    """POST one chat-completion request, retrying transient failures.

    Transient failures (connection errors, timeouts, 429, 5xx) back off
    exponentially; authentication and other client errors fail immediately.
    """
    headers = {"Content-Type": "application/json"}
    if auth_token:
        headers["Authorization"] = f"Bearer {auth_token}"
    payload = {
        "model": model_name,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": temperature,
    }
    last_failure = "no attempts made"
    for attempt in range(1, retry_policy.max_attempts + 1):
        try:
            response = requests.post(
                endpoint, json=payload, headers=headers, timeout=timeout
            )
        except requests.RequestException as exc:
            last_failure = f"transport error: {exc}"
        else:
            if response.status_code in (401, 403):
                raise RemoteError(
                    f"authentication rejected by {endpoint} "
                    f"(HTTP {response.status_code})"
                )
            if response.status_code == 451:
                return SummaryResponse(text=None, attempts=attempt)
            if response.status_code == 200:
                kind, text = _extract_content(response.text)
                if kind == "refusal":
                    return SummaryResponse(text=None, attempts=attempt)
                return SummaryResponse(text=text, attempts=attempt)
            if response.status_code == 429 or response.status_code >= 500:
                last_failure = f"HTTP {response.status_code}"
            else:
                raise RemoteError(
                    f"endpoint {endpoint} returned HTTP {response.status_code}"
                )
        if attempt < retry_policy.max_attempts:
            time.sleep(retry_policy.delay(attempt))
    raise RemoteError(
        f"request to {endpoint} failed after {retry_policy.max_attempts} attempts "
        f"({last_failure})"
    )


def _extract_content(body: str) -> tuple[str, str]:
    """Pull the completion text out of a JSON or plain-text response body."""
    text = body
    try:
        parsed = json.loads(body)
    except json.JSONDecodeError:
        parsed = None
    if isinstance(parsed, dict):
        error = parsed.get("error")
        if isinstance(error, dict) and error.get("code") in _REFUSAL_CODES:
            return "refusal", ""
        choices = parsed.get("choices")
        if isinstance(choices, list) and choices:
            first = choices[0]
            if isinstance(first, dict):
                message = first.get("message")
                if isinstance(message, dict) and isinstance(message.get("content"), str):
                    text = message["content"]
                elif isinstance(first.get("text"), str):
                    text = first["text"]
    if not text.strip():
        return "refusal", ""
    return "ok", text


def parse_listed_sentences(response: str, style: str) -> list[str]:
    """Extract summary sentences from a list-formatted response.

    Non-matching lines (preambles, sign-offs) are ignored for the dash and
    numbered styles; the plain style falls back to sentence splitting.
    """
    if style == "dash_bulleted":
        out = []
        for line in response.splitlines():
            stripped = line.strip()
            if stripped.startswith("-"):
                item = stripped.lstrip("-").strip()
                if item:
                    out.append(item)
        return out
    if style == "numbered":
        out = []
        for line in response.splitlines():
            head, dot, tail = line.strip().partition(". ")
            if dot and head.isdigit():
                item = tail.strip()
                if item:
                    out.append(item)
        return out
    if style == "plain":
        return list(split_sentences(response).sentences)
    raise ConfigError(f"unknown list style {style!r}")


def subsample_sentences(
    sentences: Sequence[str], required: int, seed: int
) -> list[str]:
    """Keep ``required`` sentences chosen uniformly at random, preserving
    original relative order; fewer than required passes through unchanged."""
    if required < 1:
        raise ValueError(f"required must be >= 1, got {required}")
    if len(sentences) <= required:
        return list(sentences)
    rng = random.Random(seed)
    keep = sorted(rng.sample(range(len(sentences)), required))
    return [sentences[i] for i in keep]


@dataclass
class GenerationStats:
    """Conservation ledger: every request is a refusal or a parsed response,
    and every parsed response is exactly compliant, subsampled, or under-length."""

    total_requests: int = 0
    refusals: int = 0
    exact_compliance: int = 0
    subsampled: int = 0

    @property
    def parsed_responses(self) -> int:
        return self.total_requests - self.refusals

    @property
    def under_length(self) -> int:
        return self.parsed_responses - self.exact_compliance - self.subsampled

    def compliance_line(self) -> str:
        if self.total_requests == 0:
            return "exact compliance: 0.0%, refusals: 0.0%"
        compliance = 100.0 * self.exact_compliance / self.total_requests
        refusals = 100.0 * self.refusals / self.total_requests
        return f"exact compliance: {compliance:.1f}%, refusals: {refusals:.1f}%"


def _record_seed(seed: int, record_id: str) -> int:
    digest = hashlib.sha256(f"{seed}|{record_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def postprocess_response(
    response_text: str | None,
    template: PromptTemplate,
    required: int,
    subsample_seed: int,
    stats: GenerationStats,
) -> str:
    """Turn one raw response into stored summary text, updating the stats.

    Parsed sentences are re-joined with a guaranteed terminal punctuation
    mark so the stored summary splits back into the same sentence count.
    """
    stats.total_requests += 1
    if response_text is None:
        stats.refusals += 1
        return ""
    sentences = parse_listed_sentences(response_text, template.list_style)
    if len(sentences) == required:
        stats.exact_compliance += 1
    elif len(sentences) > required:
        sentences = subsample_sentences(sentences, required, subsample_seed)
        stats.subsampled += 1
    return " ".join(
        s if s.endswith(_TERMINAL_PUNCT) else s + "." for s in sentences
    )


def generate_summaries(
    records: Sequence[CorpusRecord],
    model_name: str,
    template: PromptTemplate,
    endpoint: str,
    auth_token: str,
    *,
    required_sentences: int | None = None,
    seed: int = 0,
    temperature: float = 0.0,
    max_in_flight: int = 4,
    retry_policy: RetryPolicy = RetryPolicy(),
    timeout: float = 60.0,
) -> tuple[list[CorpusRecord], GenerationStats]:
    """Fill ``model_summaries[model_name]`` for every record lacking it.

    Records that already carry a non-empty summary for the model pass
    through untouched.  Requests run concurrently up to ``max_in_flight``;
    results and statistics are deterministic given the endpoint's responses.
    """
    required = required_sentences or template.required_sentences
    pending = [
        i
        for i, record in enumerate(records)
        if not record.model_summaries.get(model_name, "").strip()
    ]
    prompts = {i: render_prompt(template, records[i].article) for i in pending}

    responses: dict[int, SummaryResponse] = {}
    if pending:
        with ThreadPoolExecutor(max_workers=max(1, max_in_flight)) as pool:
            futures = {
                i: pool.submit(
                    request_summary,
                    endpoint,
                    auth_token,
                    prompts[i],
                    retry_policy,
                    model_name=model_name,
                    temperature=temperature,
                    timeout=timeout,
                )
                for i in pending
            }
            for i, future in futures.items():
                responses[i] = future.result()

    stats = GenerationStats()
    out = list(records)
    for i in pending:
        text = postprocess_response(
            responses[i].text,
            template,
            required,
            _record_seed(seed, records[i].id),
            stats,
        )
        out[i] = records[i].with_model_summary(model_name, text)
    return out, stats
