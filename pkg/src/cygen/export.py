"""Assemble accepted pairs into the SFT-ready JSON-lines dataset.

Each (database, pipeline) combination owes round-half-up(quota x scale)
records, sampled without replacement from the deduplicated pool with a
combination-keyed seed, so the emitted file is byte-stable for a fixed
(pool, manifest, seed).
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional

from .errors import QuotaShortfall
from .pairs import QuestionCypherPair
from .seeds import derive_seed

DEFAULT_INSTRUCTION = (
    "Convert the following question into a Cypher query using the provided graph schema!"
)

SCALE_PRESETS = ("1/16", "1/4", "1", "4", "8", "16")


def parse_scale(text: str | float | int | Fraction) -> Fraction:
    if isinstance(text, Fraction):
        scale = text
    elif isinstance(text, (int, float)):
        scale = Fraction(text).limit_denominator(10**6)
    else:
        scale = Fraction(text.strip())
    if scale <= 0:
        raise ValueError("scale factor must be positive")
    return scale


def rounded_quota(quota: int, scale: Fraction) -> int:
    """Round half up, exactly, via integer arithmetic."""
    n = quota * scale
    return int((2 * n.numerator + n.denominator) // (2 * n.denominator))


@dataclass(frozen=True)
class DatasetManifest:
    name: str
    quotas: dict[tuple[str, str], int]  # (database, pipeline) -> base quota
    scale_factor: Fraction = Fraction(1)
    seed: int = 0
    instruction: str = DEFAULT_INSTRUCTION

    def target_counts(self) -> dict[tuple[str, str], int]:
        return {
            combo: rounded_quota(quota, self.scale_factor)
            for combo, quota in sorted(self.quotas.items())
        }

    def total(self) -> int:
        return sum(self.target_counts().values())


@dataclass(frozen=True)
class SftRecord:
    prompt: str
    question: str
    schema: str
    cypher: str

    def __post_init__(self):
        for name in ("prompt", "question", "schema", "cypher"):
            if not getattr(self, name).strip():
                raise ValueError(f"SFT record field {name!r} must be non-empty")


@dataclass
class Dataset:
    records: list[SftRecord]
    pair_ids: list[str]
    manifest: DatasetManifest
    dropped_duplicates: int = 0
    diagnostics: list[str] = field(default_factory=list)


def dedupe_pairs(pool: Iterable[QuestionCypherPair]) -> tuple[list[QuestionCypherPair], int]:
    """Drop exact (question, cypher) duplicates, keeping the smallest pair id."""
    ordered = sorted(pool, key=lambda p: p.id)
    seen: set[tuple[str, str]] = set()
    kept = []
    for pair in ordered:
        key = (pair.question, pair.cypher)
        if key in seen:
            continue
        seen.add(key)
        kept.append(pair)
    return kept, len(ordered) - len(kept)


def assemble(pool: list[QuestionCypherPair], manifest: DatasetManifest) -> Dataset:
    """Seeded per-combination sampling without replacement from the accepted pool."""
    import random

    deduped, dropped = dedupe_pairs(pool)
    by_combo: dict[tuple[str, str], list[QuestionCypherPair]] = {}
    for pair in deduped:
        combo = (pair.provenance.database, pair.provenance.pipeline)
        by_combo.setdefault(combo, []).append(pair)

    chosen: list[QuestionCypherPair] = []
    for combo, needed in manifest.target_counts().items():
        available = by_combo.get(combo, [])
        if len(available) < needed:
            raise QuotaShortfall(combo, len(available), needed)
        rng = random.Random(derive_seed(manifest.seed, "export", combo[0], combo[1]))
        chosen.extend(rng.sample(available, needed))

    chosen.sort(key=lambda p: p.id)
    records = [
        SftRecord(
            prompt=manifest.instruction,
            question=pair.question,
            schema=pair.schema_snippet,
            cypher=pair.cypher,
        )
        for pair in chosen
    ]
    return Dataset(
        records=records,
        pair_ids=[p.id for p in chosen],
        manifest=manifest,
        dropped_duplicates=dropped,
    )


def write_dataset(dataset: Dataset, path: str | Path) -> str:
    """One JSON object per line, keys exactly prompt/question/schema/cypher.

    Returns the content hash; a manifest sidecar lands next to the file.
    """
    path = Path(path)
    lines = []
    for record in dataset.records:
        lines.append(json.dumps(
            {
                "prompt": record.prompt,
                "question": record.question,
                "schema": record.schema,
                "cypher": record.cypher,
            },
            ensure_ascii=False,
        ))
    content = "".join(line + "\n" for line in lines)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")
    content_hash = hashlib.sha256(content.encode("utf-8")).hexdigest()

    manifest = dataset.manifest
    sidecar = {
        "name": manifest.name,
        "quotas": {f"{db}/{pipe}": q for (db, pipe), q in sorted(manifest.quotas.items())},
        "scale_factor": str(manifest.scale_factor),
        "seed": manifest.seed,
        "instruction": manifest.instruction,
        "record_count": len(dataset.records),
        "dropped_duplicates": dataset.dropped_duplicates,
        "content_sha256": content_hash,
        "pair_ids": dataset.pair_ids,
    }
    Path(str(path) + ".manifest.json").write_text(
        json.dumps(sidecar, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return content_hash


def read_dataset(path: str | Path) -> list[SftRecord]:
    records = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                payload = json.loads(line)
                records.append(SftRecord(
                    prompt=payload["prompt"],
                    question=payload["question"],
                    schema=payload["schema"],
                    cypher=payload["cypher"],
                ))
    return records


def audit_provenance(
    dataset: Dataset,
    passed_ids: set[str],
    accepted_ids: Optional[set[str]] = None,
) -> list[str]:
    """Pair ids in the dataset that lack an all-passed report or acceptance."""
    problems = []
    for pair_id in dataset.pair_ids:
        if pair_id not in passed_ids:
            problems.append(f"{pair_id}: no all-passed validation report")
        elif accepted_ids is not None and pair_id not in accepted_ids:
            problems.append(f"{pair_id}: not review-accepted")
    return problems
