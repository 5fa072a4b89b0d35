"""JSON-over-HTTP surface of the annotation service.

Authentication is a static bearer token per annotator or reviewer, taken
from config.json. All payloads carry ``schema_version`` so clients can
detect incompatible servers.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

from fastapi import Depends, FastAPI, Header, HTTPException
from pydantic import BaseModel, Field

from .store import SCHEMA_VERSION, AnnotationStore, ServiceError


class SubmitBody(BaseModel):
    schema_version: int = SCHEMA_VERSION
    rows: list[list[int]]
    unclear: bool = False
    base_revision: int = 0


class VerdictBody(BaseModel):
    token_indices: list[int]
    verdict: Literal["keep", "delete"]


class FinalizeBody(BaseModel):
    schema_version: int = SCHEMA_VERSION
    verdicts: list[VerdictBody] = Field(default_factory=list)
    added: list[list[int]] = Field(default_factory=list)


class ConsistencyBody(BaseModel):
    schema_version: int = SCHEMA_VERSION
    id: str
    decision: Literal["accept", "reject"]


def create_app(data_dir: str | Path | None = None, *, store: AnnotationStore | None = None) -> FastAPI:
    if store is None:
        if data_dir is None:
            raise ValueError("either data_dir or store is required")
        store = AnnotationStore(data_dir)
    app = FastAPI(title="mwekit annotation service", version="1")
    app.state.store = store

    def principal(authorization: str | None = Header(default=None)) -> tuple[str, str]:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(401, "bearer token required")
        found = store.principal_for_token(authorization[len("Bearer "):])
        if found is None:
            raise HTTPException(401, "unknown token")
        return found

    def run(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except ServiceError as exc:
            raise HTTPException(exc.status_code, exc.detail) from None

    def check_version(version: int) -> None:
        if version != SCHEMA_VERSION:
            raise HTTPException(422, f"unsupported schema_version {version}")

    @app.get("/tasks")
    def list_tasks(who: tuple[str, str] = Depends(principal)):
        return {"schema_version": SCHEMA_VERSION, "tasks": store.task_overview()}

    @app.get("/tasks/{task_id}")
    def task_detail(task_id: str, who: tuple[str, str] = Depends(principal)):
        name, _ = who
        detail = run(store.task_detail, task_id, name)
        return {"schema_version": SCHEMA_VERSION, **detail}

    @app.put("/tasks/{task_id}/annotations/{annotator}")
    def submit(task_id: str, annotator: str, body: SubmitBody,
               who: tuple[str, str] = Depends(principal)):
        check_version(body.schema_version)
        name, role = who
        if role != "annotator" or name != annotator:
            raise HTTPException(403, f"token does not belong to annotator {annotator!r}")
        revision = run(
            store.submit_annotation, task_id, annotator, body.rows,
            unclear=body.unclear, base_revision=body.base_revision,
        )
        return {"schema_version": SCHEMA_VERSION, "task": task_id,
                "annotator": annotator, "revision": revision}

    @app.get("/tasks/{task_id}/review")
    def review(task_id: str, who: tuple[str, str] = Depends(principal)):
        _, role = who
        if role != "reviewer":
            raise HTTPException(403, "reviewing needs a reviewer token")
        merged = run(store.merge_for_review, task_id)
        return {"schema_version": SCHEMA_VERSION, **merged}

    @app.post("/tasks/{task_id}/finalize")
    def finalize(task_id: str, body: FinalizeBody,
                 who: tuple[str, str] = Depends(principal)):
        check_version(body.schema_version)
        name, role = who
        if role != "reviewer":
            raise HTTPException(403, "finalizing needs a reviewer token")
        result = run(
            store.finalize_review, task_id,
            [v.model_dump() for v in body.verdicts], body.added, name,
        )
        return {"schema_version": SCHEMA_VERSION, **result}

    @app.get("/consistency")
    def consistency_queue(who: tuple[str, str] = Depends(principal)):
        _, role = who
        if role != "reviewer":
            raise HTTPException(403, "the consistency queue needs a reviewer token")
        return {"schema_version": SCHEMA_VERSION, **run(store.list_consistency)}

    @app.post("/consistency")
    def consistency_decide(body: ConsistencyBody,
                           who: tuple[str, str] = Depends(principal)):
        check_version(body.schema_version)
        name, role = who
        if role != "reviewer":
            raise HTTPException(403, "consistency decisions need a reviewer token")
        result = run(store.decide_consistency, body.id, body.decision, name)
        return {"schema_version": SCHEMA_VERSION, **result}

    return app
