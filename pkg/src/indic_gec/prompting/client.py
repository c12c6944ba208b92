"""Chat-completion client with per-provider dialects and a request-rate ceiling.

Providers differ only in base URL, auth header and payload dialect, so the
built-in presets below are data; a provider file can add or override them.
"""

from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import httpx
import yaml

from .templates import PromptBundle

DIALECTS = ("openai", "gemini")
_DEFAULT_AUTH_HEADER = {"openai": "Authorization", "gemini": "x-goog-api-key"}


class ConfigurationError(ValueError):
    pass


class ProviderError(RuntimeError):
    def __init__(self, message: str, status: int | None = None, transient: bool = False,
                 retry_after: float | None = None, payload=None):
        super().__init__(message)
        self.status = status
        self.transient = transient
        self.retry_after = retry_after
        self.payload = payload


class EmptyResponseError(ProviderError):
    """The provider answered but produced no usable text (refusal, block, blank)."""


@dataclass(frozen=True)
class ProviderPreset:
    name: str
    base_url: str
    auth_env_var: str | None
    dialect: str = "openai"
    rpm_limit: float | None = None
    auth_header: str | None = None
    timeout: float = 120.0

    def __post_init__(self):
        if self.dialect not in DIALECTS:
            raise ConfigurationError(f"provider {self.name!r}: unknown dialect {self.dialect!r}")


BUILTIN_PROVIDERS = {
    p.name: p
    for p in (
        ProviderPreset("openai", "https://api.openai.com/v1", "OPENAI_API_KEY", "openai", 500),
        ProviderPreset("gemini", "https://generativelanguage.googleapis.com/v1beta", "GEMINI_API_KEY", "gemini", 1000),
        ProviderPreset("together", "https://api.together.xyz/v1", "TOGETHER_API_KEY", "openai", 600),
    )
}


def load_providers(path=None, inline=()) -> dict[str, ProviderPreset]:
    """Built-in presets updated from a YAML/JSON provider file and inline entries."""
    presets = dict(BUILTIN_PROVIDERS)
    entries = []
    if path is not None:
        doc = yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}
        entries.extend(doc.get("providers", doc) if isinstance(doc, dict) else doc)
    entries.extend(inline)
    for e in entries:
        try:
            p = ProviderPreset(**e)
        except TypeError as exc:
            raise ConfigurationError(f"bad provider entry {e!r}: {exc}") from None
        presets[p.name] = p
    return presets


class RateLimiter:
    """Spaces request starts at least ``60 / rpm`` seconds apart across threads."""

    def __init__(self, rpm: float | None, clock=time.monotonic, sleep=time.sleep):
        self.interval = 60.0 / rpm if rpm else 0.0
        self._next = 0.0
        self._lock = threading.Lock()
        self._clock = clock
        self._sleep = sleep

    def acquire(self):
        if not self.interval:
            return
        with self._lock:
            now = self._clock()
            slot = max(now, self._next)
            self._next = slot + self.interval
        if slot > now:
            self._sleep(slot - now)


@dataclass(frozen=True)
class Completion:
    text: str
    meta: dict


class ChatClient:
    """Sends a :class:`PromptBundle` to one provider. Safe to share across threads."""

    def __init__(self, preset: ProviderPreset, *, api_key: str | None = None, http: httpx.Client | None = None):
        self.preset = preset
        if api_key is None and preset.auth_env_var:
            api_key = os.environ.get(preset.auth_env_var)
            if not api_key:
                raise ConfigurationError(
                    f"provider {preset.name!r}: environment variable {preset.auth_env_var} is not set"
                )
        self._api_key = api_key
        self._http = http or httpx.Client(timeout=preset.timeout)
        self._limiter = RateLimiter(preset.rpm_limit)
        self._count_lock = threading.Lock()
        self.n_requests = 0

    def close(self):
        self._http.close()

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self._api_key:
            name = self.preset.auth_header or _DEFAULT_AUTH_HEADER[self.preset.dialect]
            headers[name] = f"Bearer {self._api_key}" if name.lower() == "authorization" else self._api_key
        return headers

    def _request(self, bundle: PromptBundle) -> tuple[str, dict]:
        base = self.preset.base_url.rstrip("/")
        if self.preset.dialect == "openai":
            return f"{base}/chat/completions", {
                "model": bundle.model_id,
                "messages": [{"role": r, "content": t} for r, t in bundle.messages],
                "temperature": bundle.temperature,
                "max_tokens": bundle.max_output_tokens,
            }
        system = [t for r, t in bundle.messages if r == "system"]
        body = {
            "contents": [
                {"role": "model" if r == "assistant" else "user", "parts": [{"text": t}]}
                for r, t in bundle.messages
                if r != "system"
            ],
            "generationConfig": {"temperature": bundle.temperature, "maxOutputTokens": bundle.max_output_tokens},
        }
        if system:
            body["systemInstruction"] = {"parts": [{"text": "\n".join(system)}]}
        return f"{base}/models/{bundle.model_id}:generateContent", body

    def _parse(self, payload: dict) -> Completion:
        if self.preset.dialect == "openai":
            choices = payload.get("choices") or []
            if not choices:
                raise EmptyResponseError("response has no choices", payload=payload)
            msg = choices[0].get("message") or {}
            meta = {"finish_reason": choices[0].get("finish_reason"), "usage": payload.get("usage"),
                    "model": payload.get("model")}
            if msg.get("refusal"):
                raise EmptyResponseError(f"refusal: {msg['refusal']}", payload=payload)
            return Completion(msg.get("content") or "", meta)
        cands = payload.get("candidates") or []
        if not cands:
            block = (payload.get("promptFeedback") or {}).get("blockReason")
            raise EmptyResponseError(f"no candidates (block reason: {block})", payload=payload)
        parts = (cands[0].get("content") or {}).get("parts") or []
        meta = {"finish_reason": cands[0].get("finishReason"), "usage": payload.get("usageMetadata"),
                "model": payload.get("modelVersion")}
        return Completion("".join(p.get("text", "") for p in parts), meta)

    def complete(self, bundle: PromptBundle) -> Completion:
        url, body = self._request(bundle)
        self._limiter.acquire()
        with self._count_lock:
            self.n_requests += 1
        try:
            resp = self._http.post(url, json=body, headers=self._headers())
        except httpx.TransportError as exc:
            raise ProviderError(f"transport error: {exc}", transient=True) from exc
        if resp.status_code == 429 or resp.status_code >= 500:
            retry_after = None
            try:
                retry_after = float(resp.headers["retry-after"])
            except (KeyError, ValueError):
                pass
            raise ProviderError(f"HTTP {resp.status_code}", status=resp.status_code, transient=True,
                                retry_after=retry_after, payload=resp.text)
        if resp.status_code >= 400:
            raise ProviderError(f"HTTP {resp.status_code}: {resp.text[:500]}", status=resp.status_code,
                                payload=resp.text)
        try:
            payload = resp.json()
        except ValueError:
            raise ProviderError("response is not JSON", status=resp.status_code, payload=resp.text) from None
        return self._parse(payload)
