"""Manual-validation workflow: assignment, majority-vote resolution, HTTP API."""

from .store import (
    ACCEPT,
    REJECT,
    PairResolution,
    ReviewStore,
    ReviewTask,
    assign_reviewers,
    resolve_votes,
)

__all__ = [
    "ACCEPT", "REJECT", "PairResolution", "ReviewStore", "ReviewTask",
    "assign_reviewers", "resolve_votes",
]
