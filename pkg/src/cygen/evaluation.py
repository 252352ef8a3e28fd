"""Evaluation harness: execution-result accuracy and pairwise Cypher judging.

Accuracy is the precision of generated execution results against ground
truth: |multiset-intersection(gen, gt)| / |gen| over canonicalized rows.
Judging presents the two candidate Cyphers in both orders; only agreement on
the same underlying candidate produces a winner, anything else is a draw.
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Optional

from .errors import CypherError, EmptyGeneration, GraphConnectionError, QueryTimeout
from .gateway import LlmGateway, LlmRequest
from .graphdb.session import GraphSession
from .parsing import extract_json_array, iter_json_objects
from .prompts import PromptLibrary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EvalRecord:
    id: str
    question: str
    ground_truth_cypher: str = ""
    ground_truth_results: tuple = ()
    category: str = ""
    domain_tag: str = "in_domain"  # or 'out_of_domain'
    database: str = ""
    expected_empty: bool = False
    annotated: bool = True

    def __post_init__(self):
        if self.domain_tag not in ("in_domain", "out_of_domain"):
            raise ValueError(f"unknown domain_tag {self.domain_tag!r}")
        if self.annotated and not self.ground_truth_results and not self.expected_empty:
            raise ValueError(
                f"record {self.id}: empty ground_truth_results must be flagged expected_empty"
            )


@dataclass
class AccuracyScore:
    record_id: str
    generated_results: list
    accuracy: Optional[float]  # None = unevaluated (infrastructure failure)
    diagnostic: str = ""
    database: str = ""
    domain_tag: str = ""
    category: str = ""


@dataclass
class JudgeVerdict:
    record_id: str
    verdict: str  # 'first', 'second', 'draw'
    order_ab: Optional[str] = None  # which underlying candidate won in order A,B
    order_ba: Optional[str] = None
    reasons: tuple[str, str] = ("", "")
    diagnostic: str = ""
    database: str = ""
    domain_tag: str = ""


# --- row canonicalization -------------------------------------------------------


def canonical_value(value: Any) -> str:
    """Fixed textual form: integral floats equal ints, nulls a sentinel."""
    if value is None:
        return "<null>"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if value.is_integer():
            return str(int(value))
        return repr(value)
    if isinstance(value, str):
        return value
    if hasattr(value, "isoformat"):
        return value.isoformat()
    if isinstance(value, list):
        return "[" + ", ".join(canonical_value(v) for v in value) + "]"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}={canonical_value(v)}" for k, v in sorted(value.items())) + "}"
    if hasattr(value, "properties"):  # graph entities compare by content
        return canonical_value(dict(value.properties))
    return str(value)


def canonical_row(row: Any) -> tuple[str, ...]:
    """Column names dropped, values rendered and sorted within the row."""
    if isinstance(row, dict):
        values = list(row.values())
    elif isinstance(row, (list, tuple)):
        values = list(row)
    else:
        values = [row]
    return tuple(sorted(canonical_value(v) for v in values))


def score_rows(gen_rows: Iterable[Any], gt_rows: Iterable[Any],
               expected_empty: bool = False) -> float:
    """Multiset precision of gen against gt; reduces to set precision when
    outputs are duplicate-free."""
    gen = Counter(canonical_row(r) for r in gen_rows)
    gt = Counter(canonical_row(r) for r in gt_rows)
    total_gen = sum(gen.values())
    if total_gen == 0:
        return 1.0 if expected_empty and not gt else 0.0
    overlap = sum(min(count, gt[key]) for key, count in gen.items())
    return overlap / total_gen


# --- execution scoring ------------------------------------------------------------


def execute_and_score(
    cypher: str,
    session: GraphSession,
    record: EvalRecord,
    timeout: float = 10.0,
) -> AccuracyScore:
    if not record.annotated:
        raise ValueError(f"record {record.id} is an unannotated draft")
    stamp = dict(database=record.database, domain_tag=record.domain_tag, category=record.category)
    try:
        result = session.run(cypher, timeout=timeout)
    except QueryTimeout:
        return AccuracyScore(record.id, [], 0.0, "timeout", **stamp)
    except GraphConnectionError as exc:
        logger.warning("record %s unevaluated: %s", record.id, exc)
        return AccuracyScore(record.id, [], None, f"connection error: {exc}", **stamp)
    except CypherError as exc:
        return AccuracyScore(record.id, [], 0.0, f"execution error: {exc}", **stamp)
    accuracy = score_rows(result.rows, record.ground_truth_results, record.expected_empty)
    return AccuracyScore(record.id, list(result.rows), accuracy, "", **stamp)


# --- pairwise judging ---------------------------------------------------------------


def pairwise_judge(
    question: str,
    cypher_a: str,
    cypher_b: str,
    gateway: LlmGateway,
    prompts: Optional[PromptLibrary] = None,
    model: str = "gpt-4o",
    record_id: str = "",
    database: str = "",
    domain_tag: str = "",
) -> JudgeVerdict:
    """Two order-swapped judge calls; disagreement is a draw by construction."""
    if not cypher_a.strip() or not cypher_b.strip():
        raise ValueError("both candidate Cyphers must be non-empty")
    stamp = dict(record_id=record_id, database=database, domain_tag=domain_tag)
    if cypher_a == cypher_b:
        return JudgeVerdict(verdict="draw", diagnostic="identical candidates", **stamp)
    prompts = prompts or PromptLibrary()

    def ask(first: str, second: str) -> tuple[Optional[str], str]:
        prompt = prompts.render(
            "judge_pairwise", question=question, cypher_1=first, cypher_2=second,
        )
        request = LlmRequest(
            model=model, messages=(("user", prompt),), temperature=0.0,
            response_format_hint="json_object",
        )
        answer = gateway.chat(request)
        choice = _parse_choice(answer)
        reason = _parse_reason(answer)
        if choice is None:
            return None, reason or answer[:160]
        return (first if choice == "1" else second), reason

    winner_ab, reason_ab = ask(cypher_a, cypher_b)
    winner_ba, reason_ba = ask(cypher_b, cypher_a)
    reasons = (reason_ab, reason_ba)
    if winner_ab is None or winner_ba is None:
        return JudgeVerdict(
            verdict="draw", order_ab=_order_name(winner_ab, cypher_a),
            order_ba=_order_name(winner_ba, cypher_a), reasons=reasons,
            diagnostic="unparseable verdict in at least one order", **stamp,
        )
    if winner_ab == winner_ba:
        verdict = "first" if winner_ab == cypher_a else "second"
    else:
        verdict = "draw"
    return JudgeVerdict(
        verdict=verdict,
        order_ab=_order_name(winner_ab, cypher_a),
        order_ba=_order_name(winner_ba, cypher_a),
        reasons=reasons,
        **stamp,
    )


def _order_name(winner: Optional[str], cypher_a: str) -> Optional[str]:
    if winner is None:
        return None
    return "a" if winner == cypher_a else "b"


def _parse_choice(answer: str) -> Optional[str]:
    for obj in iter_json_objects(answer):
        choice = obj.get("better_cypher")
        if choice is None:
            continue
        choice = str(choice).strip()
        if choice in ("1", "2"):
            return choice
    return None


def _parse_reason(answer: str) -> str:
    for obj in iter_json_objects(answer):
        reason = obj.get("reason")
        if isinstance(reason, str):
            return reason[:300]
    return ""


# --- aggregation ----------------------------------------------------------------------


@dataclass
class EvalReport:
    group_by: tuple[str, ...]
    rows: list[dict]
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(
            {"group_by": list(self.group_by), "rows": self.rows, "warnings": self.warnings},
            indent=2, sort_keys=True, ensure_ascii=False,
        ) + "\n"

    def render_text(self) -> str:
        headers = [*(k for k in self.group_by), "Accuracy", "Win", "Draw", "Loss", "N(acc)", "N(judge)"]
        body = []
        for row in self.rows:
            body.append([
                str(row[k]) for k in self.group_by
            ] + [
                _pct(row["accuracy"]), _pct(row["win"]), _pct(row["draw"]), _pct(row["loss"]),
                str(row["n_scores"]), str(row["n_verdicts"]),
            ])
        widths = [
            max(len(headers[i]), *(len(r[i]) for r in body)) if body else len(headers[i])
            for i in range(len(headers))
        ]
        lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
        lines.append("  ".join("-" * w for w in widths))
        for r in body:
            lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
        return "\n".join(lines)


def _pct(value: Optional[float]) -> str:
    if value is None:
        return "N/A"
    return f"{value * 100:.2f}%"


def aggregate(
    scores: list[AccuracyScore],
    verdicts: list[JudgeVerdict],
    group_by: tuple[str, ...] = ("database", "domain_tag"),
) -> EvalReport:
    """Macro-averaged accuracy plus win/draw/loss shares, grouped and overall."""
    warnings: list[str] = []
    usable = [s for s in scores if s.accuracy is not None]
    skipped = len(scores) - len(usable)
    if skipped:
        warnings.append(f"{skipped} scores unevaluated (connection errors), excluded")

    def group_key(obj) -> tuple:
        return tuple(getattr(obj, k) for k in group_by)

    keys = sorted({group_key(s) for s in usable} | {group_key(v) for v in verdicts})
    rows = []
    for key in [*keys, None]:  # None = overall
        if key is None:
            bucket_scores, bucket_verdicts = usable, verdicts
            row: dict = {k: "overall" for k in group_by}
        else:
            bucket_scores = [s for s in usable if group_key(s) == key]
            bucket_verdicts = [v for v in verdicts if group_key(v) == key]
            row = dict(zip(group_by, key))
        row["n_scores"] = len(bucket_scores)
        row["n_verdicts"] = len(bucket_verdicts)
        row["accuracy"] = (
            sum(s.accuracy for s in bucket_scores) / len(bucket_scores)
            if bucket_scores else None
        )
        if bucket_verdicts:
            total = len(bucket_verdicts)
            row["win"] = sum(1 for v in bucket_verdicts if v.verdict == "first") / total
            row["draw"] = sum(1 for v in bucket_verdicts if v.verdict == "draw") / total
            row["loss"] = sum(1 for v in bucket_verdicts if v.verdict == "second") / total
        else:
            row["win"] = row["draw"] = row["loss"] = None
        rows.append(row)
    return EvalReport(tuple(group_by), rows, warnings)


# --- evaluation-question scaffolding -----------------------------------------------


def scaffold_eval_questions(
    gateway: LlmGateway,
    schema_text: str,
    categories: list[tuple[str, str]],
    unseen_categories: list[tuple[str, str]],
    per_category: int,
    database: str,
    prompts: Optional[PromptLibrary] = None,
    model: str = "gpt-3.5-turbo",
    temperature: float = 0.8,
) -> list[EvalRecord]:
    """Draft eval questions per category; ground truth left for annotation."""
    seen_names = {name.lower() for name, _ in categories}
    overlap = [name for name, _ in unseen_categories if name.lower() in seen_names]
    if overlap:
        raise ValueError(f"unseen categories overlap seen ones: {overlap}")
    prompts = prompts or PromptLibrary()
    drafts: list[EvalRecord] = []
    for domain_tag, bucket in (("in_domain", categories), ("out_of_domain", unseen_categories)):
        for name, _desc in bucket:
            prompt = prompts.render(
                "eval_scaffold", k=str(per_category), schema=schema_text, category=name,
            )
            request = LlmRequest(model=model, messages=(("user", prompt),), temperature=temperature)
            answer = gateway.chat(request)
            questions = _parse_questions(answer)[:per_category]
            if not questions:
                raise EmptyGeneration(f"category {name!r}: no questions parsed")
            slug = name.lower().replace(" ", "-")
            for idx, question in enumerate(questions):
                drafts.append(EvalRecord(
                    id=f"eval-{database}-{slug}-{idx:03d}",
                    question=question,
                    category=name,
                    domain_tag=domain_tag,
                    database=database,
                    annotated=False,
                ))
    return drafts


def _parse_questions(text: str) -> list[str]:
    array = extract_json_array(text)
    if array is not None:
        return [str(q).strip() for q in array if str(q).strip()]
    out = []
    for line in text.splitlines():
        line = line.strip().strip("-*").strip()
        if line.endswith("?"):
            out.append(line)
    return out


# --- record persistence ----------------------------------------------------------------


def record_to_dict(record: EvalRecord) -> dict:
    return {
        "id": record.id,
        "question": record.question,
        "ground_truth_cypher": record.ground_truth_cypher,
        "ground_truth_results": [dict(r) if isinstance(r, dict) else r
                                 for r in record.ground_truth_results],
        "category": record.category,
        "domain_tag": record.domain_tag,
        "database": record.database,
        "expected_empty": record.expected_empty,
        "annotated": record.annotated,
    }


def record_from_dict(payload: dict) -> EvalRecord:
    return EvalRecord(
        id=payload["id"],
        question=payload["question"],
        ground_truth_cypher=payload.get("ground_truth_cypher", ""),
        ground_truth_results=tuple(payload.get("ground_truth_results", [])),
        category=payload.get("category", ""),
        domain_tag=payload.get("domain_tag", "in_domain"),
        database=payload.get("database", ""),
        expected_empty=bool(payload.get("expected_empty", False)),
        annotated=bool(payload.get("annotated", True)),
    )


def write_records(records: Iterable[EvalRecord], path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record_to_dict(record), ensure_ascii=False, sort_keys=True) + "\n")


def read_records(path: str | Path) -> list[EvalRecord]:
    out = []
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(record_from_dict(json.loads(line)))
    return out
