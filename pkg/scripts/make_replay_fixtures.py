#!/usr/bin/env python3
"""Regenerate the committed replay transcripts used by the end-to-end tests.

Runs the generation pipeline once against the built-in fixture graph with the
deterministic stub provider in record mode; the resulting transcript file is
committed so replay runs are reproducible on any machine. Re-run after
changing prompt texts, the fixture graph, or the parameters below (kept in
tests/fixtures/replay_params.json, which the tests read too).

    python scripts/make_replay_fixtures.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"

PARAMS = {
    "k": 5,
    "iterations": 2,
    "target_count": 12,
    "root_seed": 7,
    "quota": 20,
    "scale": "1",
    "database": "medkg",
}


def main() -> int:
    sys.path.insert(0, str(ROOT / "src"))
    from cygen import pipeline_llm
    from cygen.gateway import LlmGateway, TokenBucket, TranscriptStore
    from cygen.graphdb import connect
    from cygen.schema import extract_schema, render_schema
    from cygen.stubllm import StubLlm

    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "replay_params.json").write_text(
        json.dumps(PARAMS, indent=2, sort_keys=True) + "\n", encoding="utf-8",
    )

    transcripts = FIXTURES / "transcripts_p1_medkg.jsonl"
    if transcripts.exists():
        transcripts.unlink()

    session = connect(f"memory://{PARAMS['database']}")
    schema = extract_schema(session)
    gateway = LlmGateway(
        mode="live",
        provider=StubLlm(session=session, schema=schema),
        store=TranscriptStore(transcripts),
        limiter=TokenBucket(rate_per_s=100000, capacity=100000),
    )
    few_shots = pipeline_llm.load_few_shots(
        ROOT / "src" / "cygen" / "prompts" / "few_shots" / "default.jsonl"
    )
    merged, result = pipeline_llm.run_pipeline(
        gateway,
        render_schema(schema),
        PARAMS["database"],
        few_shots,
        k=PARAMS["k"],
        iterations=PARAMS["iterations"],
        target_count=PARAMS["target_count"],
        max_workers=1,
    )
    print(f"recorded {transcripts} ({len(result.pairs)} pairs over "
          f"{len(merged.categories)} categories)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
