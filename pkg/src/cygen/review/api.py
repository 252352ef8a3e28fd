"""HTTP+JSON API consumed by the review UI.

Reviewers authenticate with pre-provisioned bearer tokens. The service is the
sole arbiter of resolutions; clients only fetch tasks and post decisions.
"""

from __future__ import annotations

from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..errors import AlreadyDecided, UnknownTask
from .store import ReviewStore


class DecisionBody(BaseModel):
    decision: str


def create_app(
    store: ReviewStore,
    tokens: dict[str, str],
    show_diagnostics: bool = True,
    ui_dir: Optional[str | Path] = None,
) -> FastAPI:
    app = FastAPI(title="review-service", docs_url=None, redoc_url=None)

    def authenticate(request: Request) -> str:
        header = request.headers.get("authorization", "")
        token = header.removeprefix("Bearer ").strip() if header else ""
        if not token:
            token = request.headers.get("x-review-token", "")
        reviewer = tokens.get(token)
        if reviewer is None:
            raise HTTPException(status_code=401, detail="invalid or missing token")
        return reviewer

    def task_view(task) -> dict:
        payload = store.pair_payload(task.pair_id) or {}
        view = {
            "task_id": task.task_id,
            "pair_id": task.pair_id,
            "question": payload.get("question", ""),
            "cypher": payload.get("cypher", ""),
            "schema_snippet": payload.get("schema_snippet", ""),
            "result_preview": payload.get("result_preview", []),
            "show_diagnostics": show_diagnostics,
        }
        if show_diagnostics:
            view["diagnostics"] = payload.get("diagnostics", {})
        return view

    @app.get("/api/tasks/next")
    def next_task(reviewer: str = Query(...), caller: str = Depends(authenticate)):
        if caller != reviewer:
            raise HTTPException(status_code=403, detail="token does not match reviewer")
        task = store.next_task(reviewer)
        if task is None:
            return {"task": None}
        return {"task": task_view(task)}

    @app.post("/api/tasks/{task_id}/decision")
    def submit(task_id: str, body: DecisionBody, caller: str = Depends(authenticate)):
        if body.decision not in ("accept", "reject"):
            raise HTTPException(status_code=422, detail="decision must be accept or reject")
        try:
            resolution = store.submit_decision(task_id, caller, body.decision)
        except UnknownTask as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except AlreadyDecided as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except PermissionError as exc:
            raise HTTPException(status_code=403, detail=str(exc))
        return {
            "pair_id": resolution.pair_id,
            "outcome": resolution.outcome,
            "decisions": len(resolution.decisions),
        }

    @app.get("/api/pairs/{pair_id}")
    def pair_detail(pair_id: str, caller: str = Depends(authenticate)):
        payload = store.pair_payload(pair_id)
        if payload is None:
            raise HTTPException(status_code=404, detail=f"no pair {pair_id!r}")
        if not show_diagnostics:
            payload = {k: v for k, v in payload.items() if k != "diagnostics"}
        resolution = store.resolution(pair_id)
        return {
            "pair": payload,
            "outcome": resolution.outcome,
            "decisions": [
                {"reviewer": reviewer, "decision": decision}
                for reviewer, decision in resolution.decisions
            ],
        }

    @app.get("/api/stats")
    def stats(caller: str = Depends(authenticate)):
        return store.stats()

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
