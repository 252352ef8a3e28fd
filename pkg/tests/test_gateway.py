"""Gateway behavior: fingerprints, record/replay, retries."""

import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cygen.errors import RateLimited, ReplayMiss
from cygen.gateway import (
    LlmGateway,
    LlmRequest,
    LlmTranscript,
    ProviderReply,
    RetryableProviderError,
    TokenBucket,
    TranscriptStore,
    request_fingerprint,
)


def _req(content="hello", temp=0.0, model="m1"):
    return LlmRequest(model=model, messages=(("user", content),), temperature=temp)


def test_request_invariants():
    with pytest.raises(ValueError):
        LlmRequest(model="m", messages=())
    with pytest.raises(ValueError):
        LlmRequest(model="m", messages=(("assistant", "hi"),))
    with pytest.raises(ValueError):
        LlmRequest(model="m", messages=(("user", "hi"),), temperature=3.0)


@given(st.text(max_size=200), st.floats(min_value=0, max_value=2, allow_nan=False))
def test_fingerprint_stability(content, temp):
    a = request_fingerprint(LlmRequest("m", (("user", content or "x"),), temp))
    b = request_fingerprint(LlmRequest("m", (("user", content or "x"),), temp))
    assert a == b


def test_fingerprint_sensitivity():
    base = request_fingerprint(_req())
    assert request_fingerprint(_req(content="other")) != base
    assert request_fingerprint(_req(temp=0.5)) != base
    assert request_fingerprint(_req(model="m2")) != base
    # max_output_tokens is not part of the fingerprint
    tweaked = LlmRequest("m1", (("user", "hello"),), 0.0, max_output_tokens=9)
    assert request_fingerprint(tweaked) == base


def test_replay_round_trip(tmp_path):
    store = TranscriptStore(tmp_path / "t.jsonl")
    request = _req()
    store.append(LlmTranscript(request_fingerprint(request), "recorded answer"))
    gateway = LlmGateway(mode="replay", store=store)
    assert gateway.chat(request) == "recorded answer"


def test_replay_miss(tmp_path):
    gateway = LlmGateway(mode="replay", store=TranscriptStore(tmp_path / "t.jsonl"))
    with pytest.raises(ReplayMiss):
        gateway.chat(_req("never recorded"))


def test_replay_fifo_for_repeated_requests(tmp_path):
    store = TranscriptStore(tmp_path / "t.jsonl")
    fp = request_fingerprint(_req())
    store.append(LlmTranscript(fp, "first"))
    store.append(LlmTranscript(fp, "second"))
    gateway = LlmGateway(mode="replay", store=store)
    assert gateway.chat(_req()) == "first"
    assert gateway.chat(_req()) == "second"
    assert gateway.chat(_req()) == "second"  # exhausted queues repeat the tail


def test_store_survives_reload(tmp_path):
    path = tmp_path / "t.jsonl"
    store = TranscriptStore(path)
    store.append(LlmTranscript("fp1", "answer", 0.5, 10, 20))
    reloaded = TranscriptStore(path)
    assert reloaded.lookup("fp1") == "answer"
    record = json.loads(path.read_text().strip())
    assert record["prompt_tokens"] == 10


def test_retry_then_success(tmp_path):
    calls = {"n": 0}

    def provider(request):
        calls["n"] += 1
        if calls["n"] <= 2:
            raise RetryableProviderError("HTTP 429")
        return ProviderReply("finally")

    store = TranscriptStore(tmp_path / "t.jsonl")
    gateway = LlmGateway(
        mode="live", provider=provider, store=store,
        limiter=TokenBucket(10000, 10000), backoff_base_s=0.001,
    )
    assert gateway.chat(_req()) == "finally"
    assert calls["n"] == 3
    # transcript recorded exactly once
    lines = [l for l in (tmp_path / "t.jsonl").read_text().splitlines() if l.strip()]
    assert len(lines) == 1


def test_rate_limited_after_exhaustion(tmp_path):
    def provider(request):
        raise RetryableProviderError("HTTP 429")

    gateway = LlmGateway(
        mode="live", provider=provider, store=TranscriptStore(tmp_path / "t.jsonl"),
        limiter=TokenBucket(10000, 10000), max_attempts=3, backoff_base_s=0.001,
    )
    with pytest.raises(RateLimited):
        gateway.chat(_req())


def test_concurrent_chats_all_recorded(tmp_path):
    import threading

    store = TranscriptStore(tmp_path / "t.jsonl")
    gateway = LlmGateway(
        mode="live", provider=lambda r: ProviderReply(f"echo:{r.messages[0][1]}"),
        store=store, limiter=TokenBucket(100000, 100000),
    )
    results: dict[int, str] = {}

    def worker(i):
        results[i] = gateway.chat(_req(f"message {i}"))

    threads = [threading.Thread(target=worker, args=(i,)) for i in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results == {i: f"echo:message {i}" for i in range(16)}
    lines = [l for l in (tmp_path / "t.jsonl").read_text().splitlines() if l.strip()]
    assert len(lines) == 16  # appends serialized, none lost or torn
    replay = LlmGateway(mode="replay", store=TranscriptStore(tmp_path / "t.jsonl"))
    assert replay.chat(_req("message 3")) == "echo:message 3"


def test_live_then_replay_byte_identical(tmp_path):
    store = TranscriptStore(tmp_path / "t.jsonl")
    gateway = LlmGateway(
        mode="live", provider=lambda r: ProviderReply("résponse é"),
        store=store, limiter=TokenBucket(10000, 10000),
    )
    live = gateway.chat(_req())
    replay = LlmGateway(mode="replay", store=TranscriptStore(tmp_path / "t.jsonl"))
    assert replay.chat(_req()) == live
