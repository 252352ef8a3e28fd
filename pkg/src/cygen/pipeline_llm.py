"""LLM-prompting generation pipeline: propose categories, merge, generate pairs.

Category proposal runs several iterations of the same prompt, the candidates
are merged down to a fixed count, then each category gets a few-shot
generation call. All calls go through the gateway, so recorded transcripts
replay the whole pipeline deterministically.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

from .errors import AllIterationsFailed, EmptyGeneration, MergeShortfall
from .gateway import LlmGateway, LlmRequest, request_fingerprint
from .pairs import Provenance, QuestionCypherPair, slugify
from .parsing import parse_name_description_list, parse_question_cypher_entries
from .prompts import PromptLibrary, format_few_shots

logger = logging.getLogger(__name__)

DEFAULT_TARGET_COUNT = 12
DEFAULT_ITERATIONS = 5

_RETRY_NUDGE = (
    "Your previous response could not be parsed. Respond again with a plain "
    "numbered list of exactly the requested categories, one per line, in the "
    "form 'name: short description'."
)


@dataclass(frozen=True)
class CategorySet:
    categories: tuple[tuple[str, str], ...]  # (name, description)
    source: str  # 'proposed' or 'merged'

    def __post_init__(self):
        names = [name.lower() for name, _ in self.categories]
        if len(names) != len(set(names)):
            raise ValueError("category names must be unique within a set")
        if self.source not in ("proposed", "merged"):
            raise ValueError(f"unknown source {self.source!r}")

    def names(self) -> list[str]:
        return [name for name, _ in self.categories]


@dataclass
class ProposalResult:
    sets: list[CategorySet]
    diagnostics: list[str] = field(default_factory=list)


@dataclass
class GenerationResult:
    pairs: list[QuestionCypherPair]
    diagnostics: list[str] = field(default_factory=list)


def _dedupe(entries: list[tuple[str, str]]) -> list[tuple[str, str]]:
    seen = set()
    out = []
    for name, desc in entries:
        key = name.lower()
        if key not in seen:
            seen.add(key)
            out.append((name, desc))
    return out


def propose_categories(
    gateway: LlmGateway,
    schema_text: str,
    iterations: int = DEFAULT_ITERATIONS,
    model: str = "gpt-4o",
    temperature: float = 0.8,
    prompts: Optional[PromptLibrary] = None,
    max_parse_retries: int = 2,
) -> ProposalResult:
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    prompts = prompts or PromptLibrary()
    base_prompt = prompts.render("categories_propose", schema=schema_text)
    sets: list[CategorySet] = []
    diagnostics: list[str] = []
    for iteration in range(iterations):
        messages: list[tuple[str, str]] = [("user", base_prompt)]
        parsed: Optional[list[tuple[str, str]]] = None
        for _attempt in range(max_parse_retries + 1):
            request = LlmRequest(model=model, messages=tuple(messages), temperature=temperature)
            response = gateway.chat(request)
            entries = _dedupe(parse_name_description_list(response))
            if entries:
                parsed = entries
                break
            messages = messages + [("assistant", response), ("user", _RETRY_NUDGE)]
        if parsed is None:
            diagnostics.append(f"iteration {iteration}: no parseable category list; skipped")
            logger.warning("category proposal iteration %d unparseable", iteration)
            continue
        sets.append(CategorySet(tuple(parsed), source="proposed"))
    if not sets:
        raise AllIterationsFailed("no proposal iteration produced a parseable category set")
    return ProposalResult(sets, diagnostics)


def merge_categories(
    gateway: LlmGateway,
    candidates: list[CategorySet],
    target_count: int = DEFAULT_TARGET_COUNT,
    model: str = "gpt-4o",
    temperature: float = 0.8,
    prompts: Optional[PromptLibrary] = None,
) -> CategorySet:
    if not candidates:
        raise ValueError("candidates must be non-empty")
    prompts = prompts or PromptLibrary()
    listing = "\n".join(
        f"{name}: {desc}" if desc else name
        for cand in candidates
        for name, desc in cand.categories
    )
    prompt = prompts.render("categories_merge", categories_list=listing)
    messages: list[tuple[str, str]] = [("user", prompt)]
    for attempt in range(2):
        request = LlmRequest(model=model, messages=tuple(messages), temperature=temperature)
        response = gateway.chat(request)
        entries = _dedupe(parse_name_description_list(response))
        if len(entries) >= target_count:
            return CategorySet(tuple(entries[:target_count]), source="merged")
        if attempt == 0:
            nudge = (
                f"That gave {len(entries)} categories; I need exactly {target_count}. "
                f"Respond with a numbered list of exactly {target_count} categories, "
                "one per line, in the form 'name: short description'."
            )
            messages = messages + [("assistant", response), ("user", nudge)]
    raise MergeShortfall(f"could not reach {target_count} merged categories")


def generate_pairs(
    gateway: LlmGateway,
    schema_text: str,
    category: tuple[str, str],
    k: int,
    few_shots: list[dict],
    database: str,
    model: str = "gpt-4o",
    temperature: float = 0.8,
    prompts: Optional[PromptLibrary] = None,
    schema_snippet: Optional[str] = None,
    language_tag: str = "en",
) -> GenerationResult:
    if k < 1:
        raise ValueError("k must be >= 1")
    if not few_shots:
        raise ValueError("few_shots must be non-empty")
    prompts = prompts or PromptLibrary()
    name, _desc = category
    prompt = prompts.render(
        "pairs_generate",
        k=str(k),
        schema=schema_text,
        category=name,
        examples=format_few_shots(few_shots),
    )
    request = LlmRequest(model=model, messages=(("user", prompt),), temperature=temperature)
    response = gateway.chat(request)
    fingerprint = request_fingerprint(request)
    entries, diagnostics = parse_question_cypher_entries(response)
    if not entries:
        raise EmptyGeneration(f"category {name!r}: zero parseable pairs")
    if len(entries) > k:
        diagnostics.append(f"model returned {len(entries)} entries; truncated to k={k}")
        entries = entries[:k]
    slug = slugify(name)
    snippet = schema_snippet if schema_snippet is not None else f"Graph schema: {schema_text}"
    pairs = []
    for idx, entry in enumerate(entries):
        pairs.append(QuestionCypherPair(
            id=f"p1-{database}-{slug}-{idx:03d}",
            question=entry["question"],
            cypher=entry["cypher"],
            schema_snippet=snippet,
            provenance=Provenance(
                pipeline="P1", database=database, category=slug, seed=fingerprint[:16],
            ),
            language_tag=language_tag,
        ))
    return GenerationResult(pairs, diagnostics)


def run_pipeline(
    gateway: LlmGateway,
    schema_text: str,
    database: str,
    few_shots: list[dict],
    k: int = 10,
    iterations: int = DEFAULT_ITERATIONS,
    target_count: int = DEFAULT_TARGET_COUNT,
    model: str = "gpt-4o",
    temperature: float = 0.8,
    prompts: Optional[PromptLibrary] = None,
    max_workers: int = 4,
    language_tag: str = "en",
) -> tuple[CategorySet, GenerationResult]:
    """Full P1 run: propose -> merge -> per-category generation.

    Pair assembly is order-stable by (category order, response order) no
    matter how the per-category tasks interleave.
    """
    prompts = prompts or PromptLibrary()
    proposal = propose_categories(
        gateway, schema_text, iterations, model, temperature, prompts,
    )
    merged = merge_categories(
        gateway, proposal.sets, target_count, model, temperature, prompts,
    )
    diagnostics = list(proposal.diagnostics)

    def task(category: tuple[str, str]) -> GenerationResult:
        return generate_pairs(
            gateway, schema_text, category, k, few_shots, database,
            model, temperature, prompts, language_tag=language_tag,
        )

    results: list[GenerationResult] = []
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(task, merged.categories))
    else:
        results = [task(category) for category in merged.categories]

    pairs: list[QuestionCypherPair] = []
    for result in results:
        pairs.extend(result.pairs)
        diagnostics.extend(result.diagnostics)
    return merged, GenerationResult(pairs, diagnostics)


def load_few_shots(path) -> list[dict]:
    shots = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                shots.append(json.loads(line))
    return shots
