"""Review workflow: vote table, assignment balance, store, and HTTP API."""

import itertools

import pytest
from fastapi.testclient import TestClient
from hypothesis import given, settings
from hypothesis import strategies as st

from cygen.errors import AlreadyDecided, InsufficientReviewers, UnknownTask
from cygen.review.api import create_app
from cygen.review.store import ReviewStore, assign_reviewers, resolve_votes


# --- vote table ------------------------------------------------------------------


def test_vote_table_exhaustive():
    # all four 2-vote combinations
    expected_two = {
        ("accept", "accept"): "accepted",
        ("reject", "reject"): "rejected",
        ("accept", "reject"): "awaiting_tiebreak",
        ("reject", "accept"): "awaiting_tiebreak",
    }
    for votes, outcome in expected_two.items():
        decisions = [(f"r{i}", v) for i, v in enumerate(votes)]
        assert resolve_votes(decisions) == outcome, votes
    # all eight 3-vote combinations resolve by strict majority
    for votes in itertools.product(["accept", "reject"], repeat=3):
        decisions = [(f"r{i}", v) for i, v in enumerate(votes)]
        accepts = votes.count("accept")
        expected = "accepted" if accepts >= 2 else "rejected"
        assert resolve_votes(decisions) == expected, votes


def test_partial_votes():
    assert resolve_votes([]) == "awaiting_votes"
    assert resolve_votes([("r1", "accept")]) == "awaiting_votes"


# --- assignment -------------------------------------------------------------------


def test_assignment_balance_and_distinctness():
    pairs = [f"p{i}" for i in range(10)]
    reviewers = ["a", "b", "c", "d", "e"]
    assignments = assign_reviewers(pairs, reviewers, seed=3)
    assert len(assignments) == 20
    loads = {r: 0 for r in reviewers}
    per_pair: dict[str, list[str]] = {}
    for pair_id, reviewer in assignments:
        loads[reviewer] += 1
        per_pair.setdefault(pair_id, []).append(reviewer)
    assert all(count == 4 for count in loads.values())
    for pair_id, two in per_pair.items():
        assert len(two) == 2 and two[0] != two[1]


def test_assignment_deterministic():
    pairs = [f"p{i}" for i in range(7)]
    reviewers = ["a", "b", "c", "d"]
    assert assign_reviewers(pairs, reviewers, 42) == assign_reviewers(pairs, reviewers, 42)
    assert assign_reviewers(pairs, reviewers, 42) != assign_reviewers(pairs, reviewers, 43)


def test_single_pair_distinct_reviewers():
    assignments = assign_reviewers(["p1"], ["a", "b", "c"], 0)
    assert len(assignments) == 2
    assert assignments[0][1] != assignments[1][1]


def test_too_few_reviewers():
    with pytest.raises(InsufficientReviewers):
        assign_reviewers(["p1"], ["a", "b"], 0)


@settings(max_examples=40, deadline=None)
@given(
    n_pairs=st.integers(min_value=1, max_value=40),
    n_reviewers=st.integers(min_value=3, max_value=9),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_assignment_balance_property(n_pairs, n_reviewers, seed):
    pairs = [f"p{i}" for i in range(n_pairs)]
    reviewers = [f"r{i}" for i in range(n_reviewers)]
    assignments = assign_reviewers(pairs, reviewers, seed)
    loads = {r: 0 for r in reviewers}
    for _, reviewer in assignments:
        loads[reviewer] += 1
    assert max(loads.values()) - min(loads.values()) <= 1


# --- store -----------------------------------------------------------------------


@pytest.fixture()
def store(tmp_path):
    store = ReviewStore(tmp_path / "review.sqlite")
    store.add_pairs([
        {"id": f"p{i}", "question": f"Q{i}?", "cypher": f"MATCH (n:T{i}) RETURN n",
         "schema_snippet": "Graph schema: ...", "result_preview": [],
         "diagnostics": {"verdicts": {}}}
        for i in range(4)
    ])
    store.create_assignments([f"p{i}" for i in range(4)], ["alice", "bob", "carol"], seed=1)
    yield store
    store.close()


def _tasks_for_pair(store, pair_id):
    # reviewers assigned to this pair, via their next pending tasks
    out = {}
    for reviewer in ("alice", "bob", "carol"):
        task = store.next_task(reviewer)
        while task is not None and task.pair_id != pair_id:
            break
        if task is not None and task.pair_id == pair_id:
            out[reviewer] = task
    return out


def test_unanimous_accept(store):
    tasks = [t for r in ("alice", "bob", "carol") for t in [store.next_task(r)]
             if t is not None and t.pair_id == "p0"]
    assert len(tasks) == 2
    first = store.submit_decision(tasks[0].task_id, tasks[0].reviewer_id, "accept")
    assert first.outcome == "awaiting_votes"
    second = store.submit_decision(tasks[1].task_id, tasks[1].reviewer_id, "accept")
    assert second.outcome == "accepted"
    assert "p0" in store.export_accepted()


def test_conflict_creates_third_task_and_majority(store):
    tasks = [t for r in ("alice", "bob", "carol") for t in [store.next_task(r)]
             if t is not None and t.pair_id == "p0"]
    involved = {t.reviewer_id for t in tasks}
    store.submit_decision(tasks[0].task_id, tasks[0].reviewer_id, "accept")
    resolution = store.submit_decision(tasks[1].task_id, tasks[1].reviewer_id, "reject")
    assert resolution.outcome == "awaiting_tiebreak"
    third = next(r for r in ("alice", "bob", "carol") if r not in involved)
    third_task = store.get_task(f"p0::{third}")
    assert third_task.pair_id == "p0" and third_task.status == "pending"
    final = store.submit_decision(third_task.task_id, third, "reject")
    assert final.outcome == "rejected"
    assert "p0" not in store.export_accepted()


def test_duplicate_submission_rejected(store):
    task = store.next_task("alice")
    store.submit_decision(task.task_id, "alice", "accept")
    with pytest.raises(AlreadyDecided):
        store.submit_decision(task.task_id, "alice", "reject")


def test_unknown_task(store):
    with pytest.raises(UnknownTask):
        store.submit_decision("nope::alice", "alice", "accept")


def test_wrong_reviewer_rejected(store):
    task = store.next_task("alice")
    with pytest.raises(PermissionError):
        store.submit_decision(task.task_id, "bob", "accept")


def test_resolution_idempotent(store):
    task = store.next_task("alice")
    store.submit_decision(task.task_id, "alice", "accept")
    a = store.resolution(task.pair_id)
    b = store.resolution(task.pair_id)
    assert a == b


def test_simultaneous_submissions_record_exactly_one(tmp_path):
    import threading

    store = ReviewStore(tmp_path / "race.sqlite")
    store.add_pairs([{"id": "p", "question": "q", "cypher": "c"}])
    tasks = store.create_assignments(["p"], ["a", "b", "c"], seed=0)
    task = tasks[0]
    outcomes: list = []

    def submit(decision):
        try:
            store.submit_decision(task.task_id, task.reviewer_id, decision)
            outcomes.append("ok")
        except AlreadyDecided:
            outcomes.append("dup")

    threads = [threading.Thread(target=submit, args=(d,)) for d in ("accept", "reject")]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert sorted(outcomes) == ["dup", "ok"]
    assert len(store.resolution("p").decisions) == 1
    store.close()


def test_concurrent_pair_submissions_consistent(tmp_path):
    import threading

    store = ReviewStore(tmp_path / "race2.sqlite")
    store.add_pairs([{"id": "p", "question": "q", "cypher": "c"}])
    tasks = store.create_assignments(["p"], ["a", "b", "c"], seed=1)

    def submit(task, decision):
        store.submit_decision(task.task_id, task.reviewer_id, decision)

    threads = [
        threading.Thread(target=submit, args=(tasks[0], "accept")),
        threading.Thread(target=submit, args=(tasks[1], "reject")),
    ]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    resolution = store.resolution("p")
    assert resolution.outcome == "awaiting_tiebreak"
    assert len(resolution.decisions) == 2
    # exactly one third task was created despite the race
    all_tasks = store._conn.execute(
        "SELECT COUNT(*) FROM tasks WHERE pair_id = 'p'"
    ).fetchone()[0]
    assert all_tasks == 3
    store.close()


def test_export_accepted_sorted_and_filtered(tmp_path):
    store = ReviewStore(tmp_path / "r.sqlite")
    store.add_pairs([{"id": f"p{i}", "question": "q", "cypher": "c"} for i in range(3)])
    store.create_assignments([f"p{i}" for i in range(3)], ["a", "b", "c"], seed=0)
    assert store.export_accepted() == []
    for pair_id in ("p2", "p0"):
        for reviewer in ("a", "b", "c"):
            task = store.next_task(reviewer)
            if task is not None and task.pair_id == pair_id:
                store.submit_decision(task.task_id, reviewer, "accept")
    accepted = store.export_accepted()
    assert accepted == sorted(accepted)
    assert set(accepted) <= {"p0", "p2"}


# --- HTTP API ----------------------------------------------------------------------


TOKENS = {"tok-alice": "alice", "tok-bob": "bob", "tok-carol": "carol"}


@pytest.fixture()
def client(store):
    app = create_app(store, TOKENS, show_diagnostics=True)
    return TestClient(app)


def _auth(token):
    return {"Authorization": f"Bearer {token}"}


def test_api_requires_token(client):
    assert client.get("/api/tasks/next?reviewer=alice").status_code == 401
    bad = client.get("/api/tasks/next?reviewer=alice", headers=_auth("nope"))
    assert bad.status_code == 401


def test_api_token_reviewer_mismatch(client):
    resp = client.get("/api/tasks/next?reviewer=bob", headers=_auth("tok-alice"))
    assert resp.status_code == 403


def test_api_fetch_decide_flow(client):
    resp = client.get("/api/tasks/next?reviewer=alice", headers=_auth("tok-alice"))
    assert resp.status_code == 200
    task = resp.json()["task"]
    assert task is not None
    assert task["question"] and task["cypher"]
    assert "diagnostics" in task

    decided = client.post(
        f"/api/tasks/{task['task_id']}/decision",
        json={"decision": "accept"},
        headers=_auth("tok-alice"),
    )
    assert decided.status_code == 200
    assert decided.json()["decisions"] == 1

    dup = client.post(
        f"/api/tasks/{task['task_id']}/decision",
        json={"decision": "accept"},
        headers=_auth("tok-alice"),
    )
    assert dup.status_code == 409


def test_api_conflict_escalates(client, store):
    tasks = [t for r in ("alice", "bob", "carol") for t in [store.next_task(r)]
             if t is not None and t.pair_id == "p0"]
    token_of = {"alice": "tok-alice", "bob": "tok-bob", "carol": "tok-carol"}
    involved = [t.reviewer_id for t in tasks]
    client.post(f"/api/tasks/{tasks[0].task_id}/decision", json={"decision": "accept"},
                headers=_auth(token_of[involved[0]]))
    resp = client.post(f"/api/tasks/{tasks[1].task_id}/decision", json={"decision": "reject"},
                       headers=_auth(token_of[involved[1]]))
    assert resp.json()["outcome"] == "awaiting_tiebreak"
    detail = client.get("/api/pairs/p0", headers=_auth("tok-alice")).json()
    assert detail["outcome"] == "awaiting_tiebreak"
    assert len(detail["decisions"]) == 2


def test_api_stats(client):
    resp = client.get("/api/stats", headers=_auth("tok-carol"))
    assert resp.status_code == 200
    payload = resp.json()
    assert payload["pairs"] == 4
    assert set(payload["outcomes"]) == {"accepted", "rejected", "awaiting_votes", "awaiting_tiebreak"}


def test_api_hides_diagnostics_when_configured(store):
    app = create_app(store, TOKENS, show_diagnostics=False)
    client = TestClient(app)
    task = client.get("/api/tasks/next?reviewer=alice", headers=_auth("tok-alice")).json()["task"]
    assert "diagnostics" not in task
    assert task["show_diagnostics"] is False


def test_api_invalid_decision(client):
    task = client.get("/api/tasks/next?reviewer=bob", headers=_auth("tok-bob")).json()["task"]
    resp = client.post(f"/api/tasks/{task['task_id']}/decision", json={"decision": "maybe"},
                       headers=_auth("tok-bob"))
    assert resp.status_code == 422
