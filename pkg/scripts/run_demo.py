#!/usr/bin/env python3
"""Offline end-to-end demo against the built-in fixture graph.

Walks the whole pipeline with the deterministic stub provider: schema
extraction, both generation pipelines, validation, passing rates, review
assignment with simulated reviewers, export, and a small evaluation round.
Everything lands under ./demo_out.

    python scripts/run_demo.py
"""

from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
OUT = ROOT / "demo_out"


def sh(*args: str) -> None:
    print("$", " ".join(args))
    subprocess.run(args, check=True, cwd=ROOT)


def main() -> int:
    OUT.mkdir(exist_ok=True)
    config = OUT / "config.yaml"
    config.write_text(f"""
root_seed: 7
parallelism: 2
databases:
  medkg:
    uri: memory://medkg
llm:
  mode: live
  provider: stub
  transcripts: {OUT}/transcripts.jsonl
pipeline:
  k: 8
  iterations: 2
  per_template: 3
paths:
  output: {OUT}
review:
  db: {OUT}/review.sqlite
  tokens:
    tok-alice: alice
    tok-bob: bob
    tok-carol: carol
export:
  quota: 40
""", encoding="utf-8")

    cli = [sys.executable, "-m", "cygen.cli", "--config", str(config)]
    sh(*cli, "schema", "extract", "--db", "medkg")
    sh(*cli, "generate", "p1", "--db", "medkg")
    sh(*cli, "generate", "p2", "--db", "medkg")
    sh(*cli, "validate", "--db", "medkg", "--input", f"{OUT}/pairs_p1_medkg.jsonl",
       "-o", f"{OUT}/reports_p1.jsonl")
    sh(*cli, "validate", "--db", "medkg", "--input", f"{OUT}/pairs_p2_medkg.jsonl",
       "-o", f"{OUT}/reports_p2.jsonl")
    sh(*cli, "report", "passing-rates", "--input", f"{OUT}/reports_p1.jsonl",
       "-o", f"{OUT}/rates_p1.json")
    sh(*cli, "report", "passing-rates", "--input", f"{OUT}/reports_p2.jsonl",
       "-o", f"{OUT}/rates_p2.json")
    sh(*cli, "review", "assign", "--input", f"{OUT}/pairs_p2_medkg.jsonl",
       "--reports", f"{OUT}/reports_p2.jsonl", "--reviewers", "alice,bob,carol",
       "--db", "medkg")
    _simulate_reviewers()
    sh(*cli, "export", "--input", f"{OUT}/pairs_p1_medkg.jsonl",
       "--input", f"{OUT}/pairs_p2_medkg.jsonl",
       "--reports", f"{OUT}/reports_p1.jsonl", "--reports", f"{OUT}/reports_p2.jsonl",
       "--quota", "40", "-o", f"{OUT}/dataset.jsonl")
    print(f"\ndemo artifacts in {OUT}")
    dataset = (OUT / "dataset.jsonl").read_text(encoding="utf-8").splitlines()
    print(f"dataset records: {len(dataset)}")
    print("first record:", json.dumps(json.loads(dataset[0]), ensure_ascii=False)[:160], "…")
    return 0


def _simulate_reviewers() -> None:
    """Accept everything, through the same store the service would use."""
    sys.path.insert(0, str(ROOT / "src"))
    from cygen.review.store import ReviewStore

    store = ReviewStore(OUT / "review.sqlite")
    decided = 0
    for reviewer in ("alice", "bob", "carol"):
        while True:
            task = store.next_task(reviewer)
            if task is None:
                break
            store.submit_decision(task.task_id, reviewer, "accept")
            decided += 1
    print(f"simulated reviewers recorded {decided} decisions; "
          f"{len(store.export_accepted())} pairs accepted")
    store.close()


if __name__ == "__main__":
    sys.exit(main())
