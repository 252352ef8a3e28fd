"""Uniform chat-LLM client with retries, rate limiting, and record/replay.

Live mode calls the provider and appends every exchange to the transcript
store; replay mode answers from the store alone, so any pipeline run is
byte-reproducible offline. Fingerprints are a pure function of
(model, messages, temperature).
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from .errors import ProviderError, RateLimited, ReplayMiss

logger = logging.getLogger(__name__)

_ROLES = ("system", "user", "assistant")


@dataclass(frozen=True)
class LlmRequest:
    model: str
    messages: tuple[tuple[str, str], ...]  # (role, content)
    temperature: float = 0.0
    max_output_tokens: int = 2048
    response_format_hint: str = "free_text"  # or "json_object"

    def __post_init__(self):
        if not self.messages:
            raise ValueError("messages must be non-empty")
        if self.messages[0][0] not in ("system", "user"):
            raise ValueError("first message role must be system or user")
        for role, _content in self.messages:
            if role not in _ROLES:
                raise ValueError(f"unknown role {role!r}")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError("temperature must be in [0, 2]")


def request_fingerprint(request: LlmRequest) -> str:
    payload = json.dumps(
        [request.model, [list(m) for m in request.messages], request.temperature],
        ensure_ascii=False,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass
class LlmTranscript:
    fingerprint: str
    response: str
    latency_s: float = 0.0
    prompt_tokens: int = 0
    completion_tokens: int = 0


class TranscriptStore:
    """Append-only JSONL of exchanges, keyed by request fingerprint.

    Replaying a fingerprint recorded more than once yields the recorded
    responses in order, which keeps repeated identical requests (for example
    category-proposal iterations) deterministic.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._queues: dict[str, list[str]] = {}
        self._cursor: dict[str, int] = {}
        if self.path.exists():
            with self.path.open(encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    record = json.loads(line)
                    self._queues.setdefault(record["fingerprint"], []).append(record["response"])

    def append(self, transcript: LlmTranscript) -> None:
        record = {
            "fingerprint": transcript.fingerprint,
            "response": transcript.response,
            "latency_s": round(transcript.latency_s, 4),
            "prompt_tokens": transcript.prompt_tokens,
            "completion_tokens": transcript.completion_tokens,
        }
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as fh:
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")
            self._queues.setdefault(transcript.fingerprint, []).append(transcript.response)

    def lookup(self, fingerprint: str) -> str:
        with self._lock:
            queue = self._queues.get(fingerprint)
            if not queue:
                raise ReplayMiss(fingerprint)
            idx = self._cursor.get(fingerprint, 0)
            if idx >= len(queue):
                idx = len(queue) - 1  # repeat the last response once exhausted
            self._cursor[fingerprint] = idx + 1
            return queue[idx]

    def __contains__(self, fingerprint: str) -> bool:
        return fingerprint in self._queues


class TokenBucket:
    """Process-wide limiter shared by all workers; blocks until a slot frees."""

    def __init__(self, rate_per_s: float = 10.0, capacity: int = 10):
        self.rate = rate_per_s
        self.capacity = capacity
        self._tokens = float(capacity)
        self._stamp = time.monotonic()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = time.monotonic()
                self._tokens = min(self.capacity, self._tokens + (now - self._stamp) * self.rate)
                self._stamp = now
                if self._tokens >= 1.0:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            time.sleep(wait)


@dataclass
class ProviderReply:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0


class RetryableProviderError(Exception):
    """Internal: provider asked us to back off (429/503)."""


Provider = Callable[[LlmRequest], ProviderReply]


class OpenAiChatProvider:
    """Chat-completions over any OpenAI-compatible HTTPS endpoint."""

    def __init__(
        self,
        base_url: str = "https://api.openai.com/v1",
        api_key_env: str = "CYGEN_LLM_API_KEY",
        timeout_s: float = 60.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.api_key_env = api_key_env
        self.timeout_s = timeout_s

    def __call__(self, request: LlmRequest) -> ProviderReply:
        import httpx

        api_key = os.environ.get(self.api_key_env)
        if not api_key:
            raise ProviderError(f"environment variable {self.api_key_env} is not set")
        body = {
            "model": request.model,
            "messages": [{"role": r, "content": c} for r, c in request.messages],
            "temperature": request.temperature,
            "max_tokens": request.max_output_tokens,
        }
        if request.response_format_hint == "json_object":
            body["response_format"] = {"type": "json_object"}
        try:
            resp = httpx.post(
                f"{self.base_url}/chat/completions",
                json=body,
                headers={"Authorization": f"Bearer {api_key}"},
                timeout=self.timeout_s,
            )
        except httpx.HTTPError as exc:
            raise RetryableProviderError(str(exc)) from exc
        if resp.status_code in (429, 503):
            raise RetryableProviderError(f"HTTP {resp.status_code}")
        if resp.status_code != 200:
            raise ProviderError(f"HTTP {resp.status_code}: {resp.text[:400]}")
        data = resp.json()
        usage = data.get("usage", {})
        return ProviderReply(
            text=data["choices"][0]["message"]["content"],
            prompt_tokens=usage.get("prompt_tokens", 0),
            completion_tokens=usage.get("completion_tokens", 0),
        )


@dataclass
class LlmGateway:
    """Front door for every LLM call in the pipeline.

    mode='live' requires a provider and records transcripts; mode='replay'
    answers purely from the store and raises ReplayMiss on novel requests.
    """

    mode: str = "replay"
    provider: Optional[Provider] = None
    store: Optional[TranscriptStore] = None
    limiter: TokenBucket = field(default_factory=TokenBucket)
    max_attempts: int = 5
    backoff_base_s: float = 0.5
    backoff_cap_s: float = 30.0

    def __post_init__(self):
        if self.mode not in ("live", "replay"):
            raise ValueError("mode must be 'live' or 'replay'")
        if self.mode == "live" and self.provider is None:
            raise ValueError("live mode needs a provider")
        if self.mode == "replay" and self.store is None:
            raise ValueError("replay mode needs a transcript store")

    def chat(self, request: LlmRequest) -> str:
        fingerprint = request_fingerprint(request)
        if self.mode == "replay":
            return self.store.lookup(fingerprint)  # type: ignore[union-attr]

        delay = self.backoff_base_s
        last_exc: Optional[Exception] = None
        for attempt in range(self.max_attempts):
            self.limiter.acquire()
            start = time.monotonic()
            try:
                reply = self.provider(request)  # type: ignore[misc]
            except RetryableProviderError as exc:
                last_exc = exc
                logger.warning("provider backoff (%s), attempt %d/%d", exc, attempt + 1, self.max_attempts)
                time.sleep(min(delay, self.backoff_cap_s))
                delay *= 2
                continue
            latency = time.monotonic() - start
            if self.store is not None:
                self.store.append(LlmTranscript(
                    fingerprint, reply.text, latency, reply.prompt_tokens, reply.completion_tokens,
                ))
            return reply.text
        raise RateLimited(f"gave up after {self.max_attempts} attempts: {last_exc}")
