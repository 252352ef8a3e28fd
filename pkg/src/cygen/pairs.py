"""QuestionCypherPair: the unit every pipeline emits and every stage consumes."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Optional


@dataclass(frozen=True)
class Provenance:
    pipeline: str  # 'P1' or 'P2'
    database: str
    category: Optional[str] = None  # P1: category slug
    template_id: Optional[str] = None  # P2: template id
    seed: Optional[str] = None  # generation seed or request fingerprint

    def __post_init__(self):
        if self.pipeline not in ("P1", "P2"):
            raise ValueError(f"unknown pipeline {self.pipeline!r}")
        if not self.database:
            raise ValueError("database must be set")
        if self.pipeline == "P1" and not self.category:
            raise ValueError("P1 provenance needs a category")
        if self.pipeline == "P2" and not self.template_id:
            raise ValueError("P2 provenance needs a template id")
        if not self.seed:
            raise ValueError("provenance needs a seed or fingerprint")


@dataclass(frozen=True)
class QuestionCypherPair:
    id: str
    question: str
    cypher: str
    schema_snippet: str
    provenance: Provenance
    language_tag: str = "en"

    def __post_init__(self):
        if not self.id:
            raise ValueError("pair id must be non-empty")
        if not self.question.strip():
            raise ValueError("question must be non-empty")
        if not self.cypher.strip():
            raise ValueError("cypher must be non-empty")


def slugify(name: str) -> str:
    """Lowercase-hyphen slug used for provenance keys and stable file paths."""
    out = []
    last_dash = True
    for ch in name.strip().lower():
        if ch.isalnum():
            out.append(ch)
            last_dash = False
        elif not last_dash:
            out.append("-")
            last_dash = True
    return "".join(out).strip("-") or "unnamed"


def pair_to_dict(pair: QuestionCypherPair) -> dict:
    payload = asdict(pair)
    payload["provenance"] = {k: v for k, v in payload["provenance"].items() if v is not None}
    return payload


def pair_from_dict(payload: dict) -> QuestionCypherPair:
    return QuestionCypherPair(
        id=payload["id"],
        question=payload["question"],
        cypher=payload["cypher"],
        schema_snippet=payload.get("schema_snippet", ""),
        provenance=Provenance(**payload["provenance"]),
        language_tag=payload.get("language_tag", "en"),
    )


def write_pairs(pairs: Iterable[QuestionCypherPair], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(json.dumps(pair_to_dict(pair), ensure_ascii=False, sort_keys=True) + "\n")


def read_pairs(path: str | Path) -> list[QuestionCypherPair]:
    pairs = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                pairs.append(pair_from_dict(json.loads(line)))
    return pairs
