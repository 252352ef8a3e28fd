"""Shared fixtures: fixture graph sessions, schemas, and the labeled corpus."""

from __future__ import annotations

from pathlib import Path

import pytest
import yaml

from cygen.gateway import LlmGateway, LlmRequest, ProviderReply, TokenBucket, TranscriptStore
from cygen.graphdb import MemorySession, connect
from cygen.schema import GraphSchema, PropertyType, RelTriple, extract_schema

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def medkg_session() -> MemorySession:
    return connect("memory://medkg")


@pytest.fixture(scope="session")
def medkg_schema(medkg_session) -> GraphSchema:
    return extract_schema(medkg_session)


@pytest.fixture(scope="session")
def hetio_schema() -> GraphSchema:
    """Hand-written biomedical-style schema (no executable database)."""
    s = PropertyType.STRING
    labels = {
        "Anatomy": {"name": s},
        "Compound": {"name": s},
        "Disease": {"name": s},
        "Gene": {"name": s},
        "Pathway": {"name": s},
        "Symptom": {"name": s},
    }
    rels = {
        "INTERACTS_GiG": {},
        "LOCALIZES_DlA": {},
        "PARTICIPATES_GpPW": {},
        "PRESENTS_DpS": {},
        "TREATS_CtD": {},
    }
    triples = (
        RelTriple("Compound", "TREATS_CtD", "Disease"),
        RelTriple("Disease", "LOCALIZES_DlA", "Anatomy"),
        RelTriple("Disease", "PRESENTS_DpS", "Symptom"),
        RelTriple("Gene", "INTERACTS_GiG", "Gene"),
        RelTriple("Gene", "PARTICIPATES_GpPW", "Pathway"),
    )
    return GraphSchema(labels, rels, triples)


@pytest.fixture(scope="session")
def corpus() -> list[dict]:
    with (FIXTURES / "validator_corpus.yaml").open(encoding="utf-8") as fh:
        entries = yaml.safe_load(fh)
    assert len(entries) >= 30
    return entries


class CorpusScriptedProvider:
    """Answers validator prompts with the corpus entry's recorded response.

    Prompts embed few-shot examples that quote other corpus entries, so
    matching anchors on the final slot of each prompt (the JSON object under
    evaluation / the Question line), never on the example section.
    """

    def __init__(self, entries: list[dict]):
        self.entries = entries

    def __call__(self, request: LlmRequest) -> ProviderReply:
        import json

        prompt = request.messages[-1][1]
        semantic_marker = "Here is the JSON object you should evaluate:"
        coherence_marker = "Now it's your turn to verify"
        if semantic_marker in prompt:
            tail = prompt[prompt.rindex(semantic_marker):]
            for entry in self.entries:
                rendered = json.dumps(
                    {"question": entry["question"], "cypher": entry["cypher"]},
                    ensure_ascii=False, indent=4,
                )
                if rendered in tail:
                    return ProviderReply(entry["semantic_response"])
            raise AssertionError("semantic prompt matched no corpus entry")
        if coherence_marker in prompt:
            tail = prompt[prompt.rindex(coherence_marker):]
            matched = [
                entry for entry in self.entries
                if f"Question:{entry['question']}\n" in tail
            ]
            for entry in matched:
                if entry.get("coherence_response") is not None:
                    return ProviderReply(entry["coherence_response"])
            raise AssertionError(
                "coherence called with no recorded response among: "
                + ", ".join(e["id"] for e in matched)
            )
        raise AssertionError("unexpected prompt shape")


@pytest.fixture()
def corpus_gateway(corpus, tmp_path) -> LlmGateway:
    """Live gateway over the scripted provider, recording to a fresh store."""
    store = TranscriptStore(tmp_path / "corpus_transcripts.jsonl")
    return LlmGateway(
        mode="live",
        provider=CorpusScriptedProvider(corpus),
        store=store,
        limiter=TokenBucket(rate_per_s=100000, capacity=100000),
    )
