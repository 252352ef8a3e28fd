"""Execution-result accuracy (Eq.-style precision) and pairwise judging."""

import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cygen.errors import GraphConnectionError
from cygen.evaluation import (
    AccuracyScore,
    EvalRecord,
    JudgeVerdict,
    aggregate,
    canonical_row,
    canonical_value,
    execute_and_score,
    pairwise_judge,
    read_records,
    record_from_dict,
    record_to_dict,
    scaffold_eval_questions,
    score_rows,
    write_records,
)
from cygen.gateway import LlmGateway, ProviderReply, TokenBucket, TranscriptStore


def oracle_score(gen_rows, gt_rows, expected_empty=False):
    """Independent brute-force multiset intersection: greedy one-for-one removal."""
    gen = [canonical_row(r) for r in gen_rows]
    remaining = [canonical_row(r) for r in gt_rows]
    if not gen:
        return 1.0 if expected_empty and not remaining else 0.0
    hits = 0
    for row in gen:
        if row in remaining:
            remaining.remove(row)
            hits += 1
    return hits / len(gen)


# --- Eq.-style arithmetic -------------------------------------------------------


def test_identical_rows_score_one():
    rows = [{"a": 1, "b": "x"}, {"a": 2, "b": "y"}]
    assert score_rows(rows, rows) == 1.0


def test_half_precision():
    gen = [{"v": "A"}, {"v": "B"}, {"v": "C"}, {"v": "D"}]
    gt = [{"v": "A"}, {"v": "B"}]
    assert score_rows(gen, gt) == 0.5
    assert oracle_score(gen, gt) == 0.5


def test_duplicate_rows_capped_by_gt_multiplicity():
    gen = [{"v": "A"}, {"v": "A"}, {"v": "B"}]
    gt = [{"v": "A"}, {"v": "B"}]
    expected = oracle_score(gen, gt)
    assert expected == pytest.approx(2 / 3)
    assert score_rows(gen, gt) == pytest.approx(expected)


def test_empty_gen_conventions():
    assert score_rows([], [{"v": 1}]) == 0.0
    assert score_rows([], [], expected_empty=True) == 1.0
    assert score_rows([], []) == 0.0  # empty but not flagged expected-empty


def test_column_names_dropped_and_order_free():
    gen = [{"x": 1, "y": "a"}]
    gt = [{"col1": "a", "col2": 1}]
    assert score_rows(gen, gt) == 1.0


def test_numeric_canonicalization():
    assert canonical_value(2.0) == canonical_value(2)
    assert canonical_value(2.5) == "2.5"
    assert canonical_value(None) == "<null>"
    assert canonical_value(True) == "true"


_VALUES = st.one_of(
    st.integers(min_value=-5, max_value=5),
    st.sampled_from(["a", "b", "c", ""]),
    st.booleans(),
    st.none(),
    st.floats(min_value=-3, max_value=3, allow_nan=False, width=32),
)
_ROWS = st.lists(st.lists(_VALUES, min_size=1, max_size=5), max_size=20)


@settings(max_examples=200, deadline=None)
@given(gen=_ROWS, gt=_ROWS)
def test_score_matches_bruteforce_oracle(gen, gt):
    assert score_rows(gen, gt) == pytest.approx(oracle_score(gen, gt))


@settings(max_examples=100, deadline=None)
@given(gen=_ROWS, gt=_ROWS, seed=st.integers(min_value=0, max_value=999))
def test_canonicalization_stability_under_permutation(gen, gt, seed):
    rng = random.Random(seed)
    base = score_rows(gen, gt)
    shuffled_rows = list(gen)
    rng.shuffle(shuffled_rows)
    shuffled_cells = [list(row) for row in shuffled_rows]
    for row in shuffled_cells:
        rng.shuffle(row)
    assert score_rows(shuffled_cells, gt) == pytest.approx(base)
    assert 0.0 <= base <= 1.0


# --- execute_and_score ------------------------------------------------------------


def _record(**overrides):
    payload = dict(
        id="r1", question="How many diseases?",
        ground_truth_cypher="MATCH (d:Disease) RETURN count(d)",
        ground_truth_results=({"count(d)": 26},),
        category="Counting", domain_tag="in_domain", database="medkg",
    )
    payload.update(overrides)
    return EvalRecord(**payload)


def test_execute_and_score_exact(medkg_session):
    score = execute_and_score("MATCH (d:Disease) RETURN count(d)", medkg_session, _record())
    assert score.accuracy == 1.0


def test_execute_and_score_error_is_zero(medkg_session):
    score = execute_and_score("MATCH (d:Disease RETURN d", medkg_session, _record())
    assert score.accuracy == 0.0
    assert score.diagnostic


def test_execute_and_score_empty_vs_nonempty(medkg_session):
    score = execute_and_score("MATCH (n:Ghost) RETURN n.name", medkg_session, _record())
    assert score.accuracy == 0.0


def test_execute_and_score_expected_empty(medkg_session):
    record = _record(ground_truth_results=(), expected_empty=True)
    score = execute_and_score("MATCH (n:Ghost) RETURN n.name", medkg_session, record)
    assert score.accuracy == 1.0


def test_connection_error_marks_unevaluated(medkg_session):
    class DeadSession:
        def run(self, *a, **k):
            raise GraphConnectionError("gone")

    score = execute_and_score("MATCH (n) RETURN n", DeadSession(), _record())
    assert score.accuracy is None
    report = aggregate([score], [])
    assert report.warnings
    assert report.rows[-1]["accuracy"] is None


def test_unannotated_record_rejected(medkg_session):
    record = _record(ground_truth_results=(), ground_truth_cypher="", annotated=False)
    with pytest.raises(ValueError):
        execute_and_score("MATCH (n) RETURN n", medkg_session, record)


def test_record_invariant_empty_needs_flag():
    with pytest.raises(ValueError):
        _record(ground_truth_results=())


# --- pairwise judging ----------------------------------------------------------------


class ScriptedJudge:
    """Gateway double returning queued judge responses."""

    def __init__(self, tmp_path, responses):
        self.calls = 0
        self.responses = list(responses)

        def provider(request):
            self.calls += 1
            return ProviderReply(self.responses.pop(0))

        self.gateway = LlmGateway(
            mode="live", provider=provider,
            store=TranscriptStore(tmp_path / "judge.jsonl"),
            limiter=TokenBucket(100000, 100000),
        )


def _choice(n, reason="because"):
    return json.dumps({"better_cypher": str(n), "reason": reason})


CYPHER_A = "MATCH (a:Disease) RETURN a.name"
CYPHER_B = "MATCH (b:Drug) RETURN b.name"


def test_judge_agreement_first(tmp_path):
    judge = ScriptedJudge(tmp_path, [_choice(1), _choice(2)])
    verdict = pairwise_judge("Q?", CYPHER_A, CYPHER_B, judge.gateway)
    assert verdict.verdict == "first"
    assert judge.calls == 2


def test_judge_agreement_second(tmp_path):
    judge = ScriptedJudge(tmp_path, [_choice(2), _choice(1)])
    verdict = pairwise_judge("Q?", CYPHER_A, CYPHER_B, judge.gateway)
    assert verdict.verdict == "second"


def test_judge_disagreement_is_draw(tmp_path):
    judge = ScriptedJudge(tmp_path, [_choice(1), _choice(1)])
    verdict = pairwise_judge("Q?", CYPHER_A, CYPHER_B, judge.gateway)
    assert verdict.verdict == "draw"


def test_judge_other_disagreement_is_draw(tmp_path):
    judge = ScriptedJudge(tmp_path, [_choice(2), _choice(2)])
    verdict = pairwise_judge("Q?", CYPHER_A, CYPHER_B, judge.gateway)
    assert verdict.verdict == "draw"


def test_identical_candidates_short_circuit(tmp_path):
    judge = ScriptedJudge(tmp_path, [])
    verdict = pairwise_judge("Q?", CYPHER_A, CYPHER_A, judge.gateway)
    assert verdict.verdict == "draw"
    assert judge.calls == 0


def test_unparseable_judge_answer_is_draw(tmp_path):
    judge = ScriptedJudge(tmp_path, ["no json here", _choice(1)])
    verdict = pairwise_judge("Q?", CYPHER_A, CYPHER_B, judge.gateway)
    assert verdict.verdict == "draw"
    assert "unparseable" in verdict.diagnostic


def test_judge_symmetry_under_relabeling(tmp_path):
    # relabeling (a,b) -> (b,a) swaps the call order of the same two
    # presentations, so the recorded per-order answers swap with it
    judge_ab = ScriptedJudge(tmp_path, [_choice(1), _choice(2)])
    verdict_ab = pairwise_judge("Q?", CYPHER_A, CYPHER_B, judge_ab.gateway)
    judge_ba = ScriptedJudge(tmp_path, [_choice(2), _choice(1)])
    verdict_ba = pairwise_judge("Q?", CYPHER_B, CYPHER_A, judge_ba.gateway)
    assert verdict_ab.verdict == "first"
    assert verdict_ba.verdict == "second"

    draw_ab = ScriptedJudge(tmp_path, [_choice(1), _choice(1)])
    draw_ba = ScriptedJudge(tmp_path, [_choice(1), _choice(1)])
    assert pairwise_judge("Q?", CYPHER_A, CYPHER_B, draw_ab.gateway).verdict == "draw"
    assert pairwise_judge("Q?", CYPHER_B, CYPHER_A, draw_ba.gateway).verdict == "draw"


def test_judge_prompt_embeds_candidates(tmp_path):
    captured = []

    def provider(request):
        captured.append(request.messages[0][1])
        return ProviderReply(_choice(1))

    gateway = LlmGateway(mode="live", provider=provider,
                         store=TranscriptStore(tmp_path / "j.jsonl"),
                         limiter=TokenBucket(1000, 1000))
    pairwise_judge("The question?", CYPHER_A, CYPHER_B, gateway)
    assert CYPHER_A in captured[0] and CYPHER_B in captured[0]
    assert "The question?" in captured[0]
    # swapped order on the second call
    assert captured[1].index(CYPHER_B) < captured[1].index(CYPHER_A)


# --- aggregation -----------------------------------------------------------------------


def _score(rid, acc, db="medkg", tag="in_domain"):
    return AccuracyScore(rid, [], acc, "", database=db, domain_tag=tag)


def _verdict(rid, v, db="medkg", tag="in_domain"):
    return JudgeVerdict(record_id=rid, verdict=v, database=db, domain_tag=tag)


def test_aggregate_macro_average():
    report = aggregate([_score("a", 1.0), _score("b", 0.0)], [])
    overall = report.rows[-1]
    assert overall["accuracy"] == 0.5


def test_aggregate_win_draw_loss():
    verdicts = [_verdict("a", "first"), _verdict("b", "draw"), _verdict("c", "second")]
    report = aggregate([], verdicts)
    overall = report.rows[-1]
    assert overall["win"] == pytest.approx(1 / 3)
    assert overall["draw"] == pytest.approx(1 / 3)
    assert overall["loss"] == pytest.approx(1 / 3)


def test_aggregate_groups_by_domain():
    scores = (
        [_score(f"i{n}", 1.0, tag="in_domain") for n in range(4)]
        + [_score(f"o{n}", 0.0, tag="out_of_domain") for n in range(2)]
    )
    report = aggregate(scores, [])
    by_tag = {row["domain_tag"]: row for row in report.rows}
    assert by_tag["in_domain"]["accuracy"] == 1.0
    assert by_tag["in_domain"]["n_scores"] == 4
    assert by_tag["out_of_domain"]["accuracy"] == 0.0
    assert by_tag["overall"]["accuracy"] == pytest.approx(4 / 6)


# --- scaffolding -----------------------------------------------------------------------


def test_scaffold_counts(tmp_path):
    def provider(request):
        return ProviderReply(json.dumps([f"Scaffolded question {i}?" for i in range(10)]))

    gateway = LlmGateway(mode="live", provider=provider,
                         store=TranscriptStore(tmp_path / "s.jsonl"),
                         limiter=TokenBucket(100000, 100000))
    seen = [(f"Cat {i}", "") for i in range(12)]
    unseen = [(f"New {i}", "") for i in range(3)]
    drafts = scaffold_eval_questions(gateway, "schema", seen, unseen, 10, "medkg")
    assert len(drafts) == 150
    assert sum(1 for d in drafts if d.domain_tag == "in_domain") == 120
    assert sum(1 for d in drafts if d.domain_tag == "out_of_domain") == 30
    assert all(not d.annotated for d in drafts)
    assert all(not d.ground_truth_cypher for d in drafts)
    assert len({d.id for d in drafts}) == 150


def test_scaffold_rejects_overlap(tmp_path):
    gateway = LlmGateway(mode="replay", store=TranscriptStore(tmp_path / "s.jsonl"))
    with pytest.raises(ValueError):
        scaffold_eval_questions(gateway, "s", [("Same", "")], [("same", "")], 10, "db")


def test_record_round_trip(tmp_path):
    record = _record()
    write_records([record], tmp_path / "records.jsonl")
    back = read_records(tmp_path / "records.jsonl")
    assert len(back) == 1
    assert record_to_dict(back[0]) == record_to_dict(record)
    assert record_from_dict(record_to_dict(record)) == record
