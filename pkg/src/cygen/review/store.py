"""Review workflow store: assignments, decisions, and majority resolutions.

Every validated pair goes to two reviewers; a disagreement automatically
creates a third task for an uninvolved reviewer, and the final outcome is the
strict majority. Persistence is a single sqlite file with an append-only
decision history, so recomputing any resolution from its stored decisions is
idempotent.
"""

from __future__ import annotations

import datetime as dt
import json
import random
import sqlite3
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from ..errors import AlreadyDecided, InsufficientReviewers, UnknownTask
from ..seeds import derive_seed

ACCEPT = "accept"
REJECT = "reject"

_SCHEMA = """
CREATE TABLE IF NOT EXISTS pairs (
    pair_id TEXT PRIMARY KEY,
    payload TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS reviewers (
    reviewer_id TEXT PRIMARY KEY
);
CREATE TABLE IF NOT EXISTS tasks (
    task_id TEXT PRIMARY KEY,
    pair_id TEXT NOT NULL,
    reviewer_id TEXT NOT NULL,
    status TEXT NOT NULL DEFAULT 'pending',
    decision TEXT,
    decided_at TEXT,
    created_seq INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS decisions (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    task_id TEXT NOT NULL,
    pair_id TEXT NOT NULL,
    reviewer_id TEXT NOT NULL,
    decision TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE INDEX IF NOT EXISTS idx_tasks_reviewer ON tasks (reviewer_id, status, created_seq);
CREATE INDEX IF NOT EXISTS idx_tasks_pair ON tasks (pair_id);
CREATE INDEX IF NOT EXISTS idx_decisions_pair ON decisions (pair_id, seq);
"""


@dataclass(frozen=True)
class ReviewTask:
    task_id: str
    pair_id: str
    reviewer_id: str
    status: str = "pending"
    decision: Optional[str] = None
    decided_at: Optional[str] = None


@dataclass(frozen=True)
class PairResolution:
    pair_id: str
    decisions: tuple[tuple[str, str], ...]  # (reviewer_id, decision) in order
    outcome: str  # accepted | rejected | awaiting_votes | awaiting_tiebreak


def resolve_votes(decisions: list[tuple[str, str]]) -> str:
    """The §-free vote table: unanimous pair decides; else third breaks the tie."""
    if len(decisions) < 2:
        return "awaiting_votes"
    first, second = decisions[0][1], decisions[1][1]
    if len(decisions) == 2:
        if first == second:
            return "accepted" if first == ACCEPT else "rejected"
        return "awaiting_tiebreak"
    votes = [d for _, d in decisions[:3]]
    accepts = sum(1 for d in votes if d == ACCEPT)
    return "accepted" if accepts >= 2 else "rejected"


def assign_reviewers(
    pair_ids: list[str], reviewers: list[str], seed: int
) -> list[tuple[str, str]]:
    """(pair_id, reviewer_id) assignments: two distinct reviewers per pair,
    least-loaded with a seeded tiebreak, so task counts differ by at most 1."""
    unique = list(dict.fromkeys(reviewers))
    if len(unique) < 3:
        raise InsufficientReviewers(
            f"need at least 3 reviewers for tie-breaking, got {len(unique)}"
        )
    rng = random.Random(seed)
    load = {r: 0 for r in unique}
    out: list[tuple[str, str]] = []
    for pair_id in pair_ids:
        tiebreak = {r: rng.random() for r in unique}
        ranked = sorted(unique, key=lambda r: (load[r], tiebreak[r]))
        for reviewer in ranked[:2]:
            load[reviewer] += 1
            out.append((pair_id, reviewer))
    return out


class ReviewStore:
    def __init__(self, path: str | Path):
        self.path = str(path)
        self._lock = threading.RLock()
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.executescript(_SCHEMA)
        self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    # --- ingest ---

    def add_pairs(self, payloads: list[dict]) -> None:
        """payloads: pair dicts (id, question, cypher, ...) shown to reviewers."""
        with self._lock, self._conn:
            self._conn.executemany(
                "INSERT OR REPLACE INTO pairs (pair_id, payload) VALUES (?, ?)",
                [(p["id"], json.dumps(p, ensure_ascii=False)) for p in payloads],
            )

    def create_assignments(
        self, pair_ids: list[str], reviewers: list[str], seed: int
    ) -> list[ReviewTask]:
        assignments = assign_reviewers(pair_ids, reviewers, seed)
        tasks = []
        with self._lock, self._conn:
            self._conn.executemany(
                "INSERT OR IGNORE INTO reviewers (reviewer_id) VALUES (?)",
                [(r,) for r in dict.fromkeys(reviewers)],
            )
            seq = self._next_seq()
            for pair_id, reviewer in assignments:
                task = ReviewTask(f"{pair_id}::{reviewer}", pair_id, reviewer)
                self._conn.execute(
                    "INSERT INTO tasks (task_id, pair_id, reviewer_id, status, created_seq) "
                    "VALUES (?, ?, ?, 'pending', ?)",
                    (task.task_id, task.pair_id, task.reviewer_id, seq),
                )
                seq += 1
                tasks.append(task)
        return tasks

    def _next_seq(self) -> int:
        row = self._conn.execute("SELECT COALESCE(MAX(created_seq), 0) FROM tasks").fetchone()
        return int(row[0]) + 1

    # --- queries ---

    def get_task(self, task_id: str) -> ReviewTask:
        row = self._conn.execute(
            "SELECT task_id, pair_id, reviewer_id, status, decision, decided_at "
            "FROM tasks WHERE task_id = ?",
            (task_id,),
        ).fetchone()
        if row is None:
            raise UnknownTask(f"no task {task_id!r}")
        return ReviewTask(*row)

    def next_task(self, reviewer_id: str) -> Optional[ReviewTask]:
        row = self._conn.execute(
            "SELECT task_id, pair_id, reviewer_id, status, decision, decided_at "
            "FROM tasks WHERE reviewer_id = ? AND status = 'pending' "
            "ORDER BY created_seq LIMIT 1",
            (reviewer_id,),
        ).fetchone()
        return None if row is None else ReviewTask(*row)

    def pair_payload(self, pair_id: str) -> Optional[dict]:
        row = self._conn.execute(
            "SELECT payload FROM pairs WHERE pair_id = ?", (pair_id,)
        ).fetchone()
        return None if row is None else json.loads(row[0])

    def resolution(self, pair_id: str) -> PairResolution:
        rows = self._conn.execute(
            "SELECT reviewer_id, decision FROM decisions WHERE pair_id = ? ORDER BY seq",
            (pair_id,),
        ).fetchall()
        decisions = tuple((r, d) for r, d in rows)
        return PairResolution(pair_id, decisions, resolve_votes(list(decisions)))

    # --- decisions ---

    def submit_decision(self, task_id: str, reviewer_id: str, decision: str) -> PairResolution:
        if decision not in (ACCEPT, REJECT):
            raise ValueError(f"decision must be accept or reject, got {decision!r}")
        with self._lock:
            self._conn.execute("BEGIN IMMEDIATE")
            try:
                task = self.get_task(task_id)
                if task.reviewer_id != reviewer_id:
                    raise PermissionError(
                        f"task {task_id} belongs to {task.reviewer_id}, not {reviewer_id}"
                    )
                if task.status != "pending":
                    raise AlreadyDecided(f"task {task_id} already decided")
                now = dt.datetime.now(dt.timezone.utc).isoformat()
                self._conn.execute(
                    "UPDATE tasks SET status='decided', decision=?, decided_at=? WHERE task_id=?",
                    (decision, now, task_id),
                )
                self._conn.execute(
                    "INSERT INTO decisions (task_id, pair_id, reviewer_id, decision, created_at) "
                    "VALUES (?, ?, ?, ?, ?)",
                    (task_id, task.pair_id, reviewer_id, decision, now),
                )
                resolution = self.resolution(task.pair_id)
                if resolution.outcome == "awaiting_tiebreak":
                    self._ensure_tiebreak_task(task.pair_id, resolution)
                    resolution = self.resolution(task.pair_id)
                self._conn.commit()
            except BaseException:
                self._conn.rollback()
                raise
        return resolution

    def _ensure_tiebreak_task(self, pair_id: str, resolution: PairResolution) -> None:
        existing = self._conn.execute(
            "SELECT COUNT(*) FROM tasks WHERE pair_id = ?", (pair_id,)
        ).fetchone()[0]
        if existing >= 3:
            return
        involved = {reviewer for reviewer, _ in resolution.decisions}
        candidates = [
            r for (r,) in self._conn.execute("SELECT reviewer_id FROM reviewers").fetchall()
            if r not in involved
        ]
        if not candidates:
            raise InsufficientReviewers(f"no uninvolved reviewer left for pair {pair_id}")
        loads = {
            r: self._conn.execute(
                "SELECT COUNT(*) FROM tasks WHERE reviewer_id = ?", (r,)
            ).fetchone()[0]
            for r in candidates
        }
        tiebreak = derive_seed(0, "tiebreak", pair_id)
        chosen = sorted(
            candidates, key=lambda r: (loads[r], derive_seed(tiebreak, r))
        )[0]
        self._conn.execute(
            "INSERT INTO tasks (task_id, pair_id, reviewer_id, status, created_seq) "
            "VALUES (?, ?, ?, 'pending', ?)",
            (f"{pair_id}::{chosen}", pair_id, chosen, self._next_seq()),
        )

    # --- exports and stats ---

    def all_pair_ids(self) -> list[str]:
        rows = self._conn.execute("SELECT DISTINCT pair_id FROM tasks ORDER BY pair_id").fetchall()
        return [r[0] for r in rows]

    def export_accepted(self) -> list[str]:
        return [
            pair_id for pair_id in self.all_pair_ids()
            if self.resolution(pair_id).outcome == "accepted"
        ]

    def stats(self) -> dict[str, Any]:
        outcomes: dict[str, int] = {
            "accepted": 0, "rejected": 0, "awaiting_votes": 0, "awaiting_tiebreak": 0,
        }
        for pair_id in self.all_pair_ids():
            outcomes[self.resolution(pair_id).outcome] += 1
        reviewer_rows = self._conn.execute(
            "SELECT reviewer_id, "
            "SUM(CASE WHEN status='decided' THEN 1 ELSE 0 END) AS decided, "
            "SUM(CASE WHEN status='pending' THEN 1 ELSE 0 END) AS pending "
            "FROM tasks GROUP BY reviewer_id ORDER BY reviewer_id"
        ).fetchall()
        return {
            "outcomes": outcomes,
            "reviewers": {
                r: {"decided": int(d or 0), "pending": int(p or 0)}
                for r, d, p in reviewer_rows
            },
            "pairs": len(self.all_pair_ids()),
        }
