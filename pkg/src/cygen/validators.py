"""The five automatic validators and their orchestration.

Order is fixed: grammatical -> semantic -> entity -> schema -> coherence.
Under the short-circuit policy any failure marks the later LLM-backed
validators as failed ("short-circuited") without spending API calls, while
the pure validators always run. Policy can also skip validators per pipeline
(LLM-generated pairs are typically not judged by a weaker validator model),
which removes them from the required set instead of failing the pair.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

from .cypher_facts import RelPatternFact, extract_facts
from .errors import (
    ConfigError,
    CypherError,
    GraphConnectionError,
    NerProviderUnavailable,
    QueryTimeout,
)
from .gateway import LlmGateway, LlmRequest
from .graphdb.session import GraphSession
from .ner import NerRegistry, fuzzy_entity_match
from .pairs import QuestionCypherPair
from .parsing import last_bool_verdict
from .prompts import PromptLibrary
from .schema import GraphSchema

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"

VALIDATORS = ("grammatical", "semantic", "entity", "schema", "coherence")
LLM_VALIDATORS = frozenset({"semantic", "coherence"})

_SCHEMA_PREFIX = "Graph schema: "


@dataclass(frozen=True)
class VerdictOutcome:
    verdict: str
    diagnostic: str = ""


@dataclass
class ValidationReport:
    pair_id: str
    verdicts: dict[str, str]
    diagnostics: dict[str, str]
    all_passed: bool
    required: tuple[str, ...]
    database: str = ""
    pipeline: str = ""


@dataclass
class ValidatorPolicy:
    short_circuit: bool = True
    skip_by_pipeline: dict[str, tuple[str, ...]] = field(
        default_factory=lambda: {"P1": ("semantic", "coherence")}
    )
    semantic_mode: str = "direct"  # or 'back_translation'
    theta: float = 0.85
    max_result_rows: int = 20
    query_timeout_s: float = 10.0

    def skipped_for(self, pipeline: str) -> frozenset[str]:
        return frozenset(self.skip_by_pipeline.get(pipeline, ()))

    def required_for(self, pipeline: str) -> tuple[str, ...]:
        skipped = self.skipped_for(pipeline)
        return tuple(v for v in VALIDATORS if v not in skipped)


@dataclass
class ValidationContext:
    session: Optional[GraphSession]
    schema: GraphSchema
    gateway: Optional[LlmGateway]
    ner: NerRegistry = field(default_factory=NerRegistry)
    prompts: PromptLibrary = field(default_factory=PromptLibrary)
    policy: ValidatorPolicy = field(default_factory=ValidatorPolicy)
    validator_model: str = "gpt-3.5-turbo"
    similarity: Optional[Callable[[str, str], float]] = None


def schema_text_of(pair: QuestionCypherPair) -> str:
    snippet = pair.schema_snippet
    if snippet.startswith(_SCHEMA_PREFIX):
        return snippet[len(_SCHEMA_PREFIX):]
    return snippet


# --- individual validators --------------------------------------------------------


def validate_grammatical(
    pair: QuestionCypherPair, session: GraphSession, timeout: float = 10.0
) -> VerdictOutcome:
    """Pass iff the query executes without error; empty results still pass."""
    try:
        session.run(pair.cypher, timeout=timeout)
    except QueryTimeout:
        return VerdictOutcome(FAIL, "timeout")
    except GraphConnectionError as exc:
        return VerdictOutcome(SKIPPED, f"connection error: {exc}")
    except CypherError as exc:
        return VerdictOutcome(FAIL, str(exc))
    return VerdictOutcome(PASS)


def validate_semantic(
    pair: QuestionCypherPair,
    gateway: LlmGateway,
    prompts: Optional[PromptLibrary] = None,
    model: str = "gpt-3.5-turbo",
    mode: str = "direct",
    theta: float = 0.85,
    similarity: Optional[Callable[[str, str], float]] = None,
) -> VerdictOutcome:
    """Direct mode: step-by-step LLM judgment ending in True/False.

    Back-translation mode asks the LLM to translate the Cypher back into a
    question and passes when similarity(question, back) >= theta.
    """
    prompts = prompts or PromptLibrary()
    schema_text = schema_text_of(pair)
    if mode == "back_translation":
        prompt = prompts.render("back_translate", schema=schema_text, cypher=pair.cypher)
        request = LlmRequest(model=model, messages=(("user", prompt),), temperature=0.0)
        back = gateway.chat(request).strip()
        score = (similarity or token_cosine)(pair.question, back)
        if score >= theta:
            return VerdictOutcome(PASS, f"similarity {score:.3f} >= {theta}")
        return VerdictOutcome(FAIL, f"similarity {score:.3f} < {theta}")

    try:
        examples = prompts.raw(_examples_name(pair.language_tag))
    except ConfigError:
        examples = prompts.raw("semantic_examples_en")
    json_object = json.dumps(
        {"question": pair.question, "cypher": pair.cypher}, ensure_ascii=False, indent=4,
    )
    prompt = prompts.render(
        "semantic_validator", schema=schema_text, example=examples, json_object=json_object,
    )
    request = LlmRequest(model=model, messages=(("user", prompt),), temperature=0.0)
    answer = gateway.chat(request)
    verdict = last_bool_verdict(answer)
    if verdict is None:
        return VerdictOutcome(FAIL, "unparseable verdict: no True/False in answer")
    return VerdictOutcome(PASS if verdict else FAIL, _tail(answer))


def _examples_name(language_tag: str) -> str:
    if language_tag == "en":
        return "semantic_examples_en"
    return f"semantic_examples_{language_tag}"


def token_cosine(a: str, b: str) -> float:
    """Bag-of-words cosine; the default back-translation similarity."""
    from collections import Counter
    import math

    ta, tb = Counter(a.casefold().split()), Counter(b.casefold().split())
    if not ta or not tb:
        return 0.0
    dot = sum(ta[t] * tb[t] for t in ta)
    norm = math.sqrt(sum(v * v for v in ta.values())) * math.sqrt(sum(v * v for v in tb.values()))
    return dot / norm if norm else 0.0


def validate_entity(
    pair: QuestionCypherPair, ner: NerRegistry
) -> VerdictOutcome:
    """Every question entity must match some Cypher literal (fuzzy, lemma-based)."""
    try:
        provider = ner.get(pair.language_tag)
        entities = provider.extract(pair.question)
    except NerProviderUnavailable as exc:
        return VerdictOutcome(SKIPPED, str(exc))
    if not entities:
        return VerdictOutcome(PASS, "no entities recognized")
    facts = extract_facts(pair.cypher)
    uncovered = [
        entity for entity in entities
        if not any(
            fuzzy_entity_match(entity, literal, pair.language_tag)
            for literal in facts.entity_literals
        )
    ]
    if uncovered:
        return VerdictOutcome(FAIL, "uncovered entities: " + ", ".join(sorted(uncovered)))
    return VerdictOutcome(PASS)


def validate_schema(pair: QuestionCypherPair, schema: GraphSchema) -> VerdictOutcome:
    """Every extracted relationship pattern must be a valid edge of the schema."""
    facts = extract_facts(pair.cypher)
    bad = [p for p in facts.relationship_patterns if not _pattern_valid(p, schema)]
    if bad:
        rendered = "; ".join(
            f"({p.source or '*'})-[:{p.name}]-({p.target or '*'}) [{p.direction}]"
            for p in sorted(bad, key=lambda p: (p.name, p.source or "", p.target or ""))
        )
        return VerdictOutcome(FAIL, f"invalid relationships: {rendered}")
    return VerdictOutcome(PASS)


def _pattern_valid(pattern: RelPatternFact, schema: GraphSchema) -> bool:
    def holds(src: Optional[str], tgt: Optional[str]) -> bool:
        for triple in schema.valid_relationships:
            if triple.name != pattern.name:
                continue
            if src is not None and triple.source != src:
                continue
            if tgt is not None and triple.target != tgt:
                continue
            return True
        return False

    if pattern.direction == "right":
        return holds(pattern.source, pattern.target)
    if pattern.direction == "left":
        return holds(pattern.target, pattern.source)
    return holds(pattern.source, pattern.target) or holds(pattern.target, pattern.source)


def validate_coherence(
    pair: QuestionCypherPair,
    session: GraphSession,
    gateway: LlmGateway,
    prompts: Optional[PromptLibrary] = None,
    model: str = "gpt-3.5-turbo",
    max_rows: int = 20,
    timeout: float = 10.0,
) -> VerdictOutcome:
    """Execute the Cypher and ask the LLM whether results answer the question."""
    prompts = prompts or PromptLibrary()
    try:
        result = session.run(pair.cypher, timeout=timeout)
    except QueryTimeout:
        return VerdictOutcome(FAIL, "timeout")
    except GraphConnectionError as exc:
        return VerdictOutcome(SKIPPED, f"connection error: {exc}")
    except CypherError as exc:
        return VerdictOutcome(FAIL, f"execution error: {exc}")
    if not result.rows:
        return VerdictOutcome(FAIL, "no results to judge")
    rendered = render_results(result.rows, result.columns, max_rows)
    prompt = prompts.render("coherence_validator", question=pair.question, results=rendered)
    request = LlmRequest(model=model, messages=(("user", prompt),), temperature=0.0)
    answer = gateway.chat(request)
    verdict = last_bool_verdict(answer)
    if verdict is None:
        return VerdictOutcome(FAIL, "unparseable verdict: no True/False in answer")
    return VerdictOutcome(PASS if verdict else FAIL, _tail(answer))


def render_results(rows: list[dict], columns: list[str], max_rows: int) -> str:
    """Bounded flat rendering of execution results for the coherence prompt."""
    cells: list[str] = []
    for row in rows[:max_rows]:
        for column in columns:
            cells.append(render_cell(row.get(column)))
    return ", ".join(cells)


def render_cell(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, list):
        return "[" + ", ".join(render_cell(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}: {render_cell(v)}" for k, v in sorted(value.items())) + "}"
    if hasattr(value, "isoformat"):
        return value.isoformat()
    if hasattr(value, "properties"):  # nodes and relationships
        return render_cell(dict(value.properties))
    return str(value)


def _tail(answer: str, limit: int = 160) -> str:
    tail = answer.strip().splitlines()[-1] if answer.strip() else ""
    return tail[-limit:]


# --- orchestration ------------------------------------------------------------------


def run_all(pair: QuestionCypherPair, ctx: ValidationContext) -> ValidationReport:
    policy = ctx.policy
    policy_skipped = policy.skipped_for(pair.provenance.pipeline)
    verdicts: dict[str, str] = {}
    diagnostics: dict[str, str] = {}
    failed_so_far = False

    for name in VALIDATORS:
        if name in policy_skipped:
            outcome = VerdictOutcome(SKIPPED, "skipped by policy")
        elif policy.short_circuit and failed_so_far and name in LLM_VALIDATORS:
            outcome = VerdictOutcome(FAIL, "short-circuited")
        else:
            outcome = _dispatch(name, pair, ctx)
        verdicts[name] = outcome.verdict
        if outcome.diagnostic:
            diagnostics[name] = outcome.diagnostic
        if outcome.verdict == FAIL:
            failed_so_far = True

    required = policy.required_for(pair.provenance.pipeline)
    return build_report(
        pair_id=pair.id,
        verdicts=verdicts,
        diagnostics=diagnostics,
        required=required,
        database=pair.provenance.database,
        pipeline=pair.provenance.pipeline,
    )


def _dispatch(name: str, pair: QuestionCypherPair, ctx: ValidationContext) -> VerdictOutcome:
    policy = ctx.policy
    if name == "grammatical":
        if ctx.session is None:
            return VerdictOutcome(SKIPPED, "no database session")
        return validate_grammatical(pair, ctx.session, policy.query_timeout_s)
    if name == "semantic":
        if ctx.gateway is None:
            return VerdictOutcome(SKIPPED, "no LLM gateway")
        return validate_semantic(
            pair, ctx.gateway, ctx.prompts, ctx.validator_model,
            policy.semantic_mode, policy.theta, ctx.similarity,
        )
    if name == "entity":
        return validate_entity(pair, ctx.ner)
    if name == "schema":
        return validate_schema(pair, ctx.schema)
    if name == "coherence":
        if ctx.session is None:
            return VerdictOutcome(SKIPPED, "no database session")
        if ctx.gateway is None:
            return VerdictOutcome(SKIPPED, "no LLM gateway")
        return validate_coherence(
            pair, ctx.session, ctx.gateway, ctx.prompts, ctx.validator_model,
            policy.max_result_rows, policy.query_timeout_s,
        )
    raise ValueError(f"unknown validator {name}")


def build_report(
    pair_id: str,
    verdicts: dict[str, str],
    diagnostics: dict[str, str],
    required: tuple[str, ...],
    database: str = "",
    pipeline: str = "",
) -> ValidationReport:
    """all_passed: every non-skipped verdict passes and no required one skipped."""
    non_skipped_ok = all(v == PASS for v in verdicts.values() if v != SKIPPED)
    no_required_skipped = all(verdicts.get(name) != SKIPPED for name in required)
    return ValidationReport(
        pair_id=pair_id,
        verdicts=dict(verdicts),
        diagnostics=dict(diagnostics),
        all_passed=non_skipped_ok and no_required_skipped,
        required=tuple(required),
        database=database,
        pipeline=pipeline,
    )


# --- persistence ---------------------------------------------------------------------


def report_to_dict(report: ValidationReport) -> dict:
    return {
        "pair_id": report.pair_id,
        "verdicts": report.verdicts,
        "diagnostics": report.diagnostics,
        "all_passed": report.all_passed,
        "required": list(report.required),
        "database": report.database,
        "pipeline": report.pipeline,
    }


def report_from_dict(payload: dict) -> ValidationReport:
    return ValidationReport(
        pair_id=payload["pair_id"],
        verdicts=dict(payload["verdicts"]),
        diagnostics=dict(payload.get("diagnostics", {})),
        all_passed=bool(payload["all_passed"]),
        required=tuple(payload.get("required", VALIDATORS)),
        database=payload.get("database", ""),
        pipeline=payload.get("pipeline", ""),
    )


def write_reports(reports: Iterable[ValidationReport], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for report in reports:
            fh.write(json.dumps(report_to_dict(report), ensure_ascii=False, sort_keys=True) + "\n")


def read_reports(path: str | Path) -> list[ValidationReport]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(report_from_dict(json.loads(line)))
    return out


# --- passing-rate table ---------------------------------------------------------------


@dataclass
class RateTable:
    group_keys: tuple[str, ...]
    rows: list[dict]

    def render_text(self) -> str:
        headers = [k.capitalize() for k in self.group_keys] + [
            "Grammatical", "Semantic", "Entity", "Schema", "Coherence", "All passed", "Count",
        ]
        body = []
        for row in self.rows:
            body.append(
                [str(row[k]) for k in self.group_keys]
                + [fmt_pct(row[name]) for name in VALIDATORS]
                + [fmt_pct(row["all_passed"]), str(row["count"])]
            )
        widths = [
            max(len(headers[i]), *(len(r[i]) for r in body)) if body else len(headers[i])
            for i in range(len(headers))
        ]
        lines = [
            "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
            "  ".join("-" * w for w in widths),
        ]
        for r in body:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(
            {"group_by": list(self.group_keys), "rows": self.rows},
            indent=2, sort_keys=True, ensure_ascii=False,
        ) + "\n"


def fmt_pct(value: Optional[float]) -> str:
    if value is None:
        return "N/A"
    text = f"{value * 100:.2f}".rstrip("0").rstrip(".")
    return f"{text}%"


def passing_rate_report(
    reports: list[ValidationReport],
    group_by: tuple[str, ...] = ("database", "pipeline"),
) -> RateTable:
    """Per-group validator pass rates over non-skipped runs, plus All passed."""
    if not reports:
        raise ValueError("reports must be non-empty")
    groups: dict[tuple, list[ValidationReport]] = {}
    for report in reports:
        key = tuple(getattr(report, k) for k in group_by)
        groups.setdefault(key, []).append(report)
    rows = []
    for key in sorted(groups):
        members = groups[key]
        row: dict = dict(zip(group_by, key))
        for name in VALIDATORS:
            ran = [r.verdicts.get(name) for r in members if r.verdicts.get(name) in (PASS, FAIL)]
            row[name] = (sum(1 for v in ran if v == PASS) / len(ran)) if ran else None
        row["all_passed"] = sum(1 for r in members if r.all_passed) / len(members)
        row["count"] = len(members)
        rows.append(row)
    return RateTable(tuple(group_by), rows)
