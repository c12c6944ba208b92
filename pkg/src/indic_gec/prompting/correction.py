"""Turning prompt bundles into corrected sentences, singly or for a whole corpus."""

from __future__ import annotations

import logging
import random
import re
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

from ..corpus import Corpus
from .cache import ResponseCache
from .client import ChatClient, EmptyResponseError, ProviderError
from .templates import ExemplarSet, PromptBundle, PromptTemplate, render

logger = logging.getLogger(__name__)

_QUOTE_PAIRS = {'"': '"', "'": "'", "“": "”", "‘": "’", "«": "»", "„": "“"}
_NEWLINES = re.compile(r"[\r\n]+")


def _wrapped(s: str) -> bool:
    return len(s) >= 2 and _QUOTE_PAIRS.get(s[0]) == s[-1]


def normalize_response(raw: str) -> str:
    """Trim, collapse line breaks, and drop one pair of quotes wrapping the whole reply.

    Quotes are left alone when the quote characters also occur inside, or
    when the inside is itself fully quoted; nothing else is touched, so
    label prefixes such as "Corrected:" survive and count against the
    system.
    """
    s = _NEWLINES.sub(" ", raw).strip()
    if _wrapped(s):
        inner = s[1:-1]
        if s[0] not in inner and s[-1] not in inner and not _wrapped(inner.strip()):
            s = inner.strip()
    if not s:
        raise EmptyResponseError("empty response after normalization", payload=raw)
    return s


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 5
    base_delay: float = 1.0
    multiplier: float = 2.0
    max_delay: float = 60.0
    jitter: float = 0.25

    def __post_init__(self):
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")

    def delay(self, attempt: int, retry_after: float | None = None, rng=random) -> float:
        """Wait before attempt ``attempt + 1`` (attempts are 1-based)."""
        if retry_after is not None:
            return min(self.max_delay, retry_after)
        d = min(self.max_delay, self.base_delay * self.multiplier ** (attempt - 1))
        return d * (1.0 + self.jitter * rng.random())


class RetriesExhausted(ProviderError):
    pass


@dataclass(frozen=True)
class ModelResponse:
    raw_text: str
    normalized_text: str
    latency_ms: int
    from_cache: bool
    provider_meta: dict = field(default_factory=dict)
    cache_key: str = ""


def correct(
    bundle: PromptBundle,
    client: ChatClient,
    cache: ResponseCache | None = None,
    retry: RetryPolicy = RetryPolicy(),
    *,
    sleep=time.sleep,
) -> ModelResponse:
    key = bundle.cache_key()
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            return ModelResponse(hit["raw_text"], hit["normalized_text"], 0, True, hit.get("provider_meta", {}), key)

    last = None
    for attempt in range(1, retry.max_attempts + 1):
        t0 = time.perf_counter()
        try:
            completion = client.complete(bundle)
        except EmptyResponseError:
            raise
        except ProviderError as exc:
            if not exc.transient:
                raise
            last = exc
            if attempt < retry.max_attempts:
                wait = retry.delay(attempt, exc.retry_after)
                logger.warning("%s (attempt %d/%d), retrying in %.2fs", exc, attempt, retry.max_attempts, wait)
                sleep(wait)
            continue
        latency = int((time.perf_counter() - t0) * 1000)
        normalized = normalize_response(completion.text)
        meta = dict(completion.meta, provider=client.preset.name, attempts=attempt)
        if cache is not None:
            cache.put(key, bundle.request_doc(), completion.text, normalized, meta)
        return ModelResponse(completion.text, normalized, latency, False, meta, key)

    raise RetriesExhausted(
        f"gave up after {retry.max_attempts} attempts; last error: {last}",
        status=last.status, payload=last.payload,
    )


@dataclass
class BatchResult:
    responses: dict[str, ModelResponse]
    failures: dict[str, str]

    @property
    def n_network_calls(self) -> int:
        return sum(not r.from_cache for r in self.responses.values())


class BatchAborted(RuntimeError):
    def __init__(self, message: str, result: BatchResult):
        super().__init__(message)
        self.result = result


def correct_corpus(
    corpus: Corpus,
    template: PromptTemplate,
    exemplars: ExemplarSet | None,
    client: ChatClient,
    cache: ResponseCache | None,
    parallelism: int = 1,
    *,
    model_id: str,
    temperature: float = 0.0,
    retry: RetryPolicy = RetryPolicy(),
    failure_threshold: float = 0.0,
) -> BatchResult:
    """Correct every pair with at most ``parallelism`` requests in flight.

    Each response is cached as soon as it arrives, so a rerun after an
    interruption only pays for the missing items. Raises
    :class:`BatchAborted` when the failure fraction exceeds
    ``failure_threshold``.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    bundles = {
        p.id: render(template, corpus.language, exemplars, p.source, model_id=model_id, temperature=temperature)
        for p in corpus.pairs
    }
    done: dict[str, ModelResponse] = {}
    failures: dict[str, str] = {}
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = {pool.submit(correct, b, client, cache, retry): pid for pid, b in bundles.items()}
        for fut in as_completed(futures):
            pid = futures[fut]
            try:
                done[pid] = fut.result()
            except ProviderError as exc:
                failures[pid] = f"{type(exc).__name__}: {exc}"
                logger.error("%s: %s", pid, failures[pid])
    order = [p.id for p in corpus.pairs]
    result = BatchResult({i: done[i] for i in order if i in done}, {i: failures[i] for i in order if i in failures})
    if corpus.pairs and len(failures) / len(corpus.pairs) > failure_threshold:
        raise BatchAborted(f"{len(failures)}/{len(corpus.pairs)} items failed", result)
    return result
