"""HTTP + JSON API over the CMS store.

POST /tasks                     create a task
GET  /tasks/{id}                task metadata + per-annotator progress
GET  /tasks/{id}/next?annotator current item view (phase-appropriate)
POST /tasks/{id}/scores         {annotator, item, phase, score}
GET  /tasks/{id}/report         CMS report

400 validation, 404 unknown ids, 409 phase violations / duplicates.
"""

from __future__ import annotations

from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import FileResponse
from pydantic import BaseModel, Field

from ..errors import (
    DuplicateItemId,
    DuplicateSubmission,
    EmptyTask,
    OutOfRange,
    PhaseViolation,
    TaskComplete,
    UnknownAnnotator,
    UnknownItem,
    UnknownTask,
)
from .store import CmsStore


class ItemIn(BaseModel):
    id: str | None = None
    source: str
    prediction: str
    reference: str


class TaskIn(BaseModel):
    items: list[ItemIn]
    alpha: float = 0.7
    annotators: list[str] | None = None


class ScoreIn(BaseModel):
    annotator: str
    item: str
    phase: str = Field(pattern="^(P1|P2)$")
    score: float


def create_app(store: CmsStore, static_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="ffrkit CMS service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    def _guard(fn, *args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (UnknownTask, UnknownItem, UnknownAnnotator) as e:
            raise HTTPException(404, str(e)) from e
        except (PhaseViolation, DuplicateSubmission) as e:
            raise HTTPException(409, str(e)) from e
        except (EmptyTask, DuplicateItemId, OutOfRange) as e:
            raise HTTPException(400, str(e)) from e

    @app.post("/tasks", status_code=201)
    def create_task(body: TaskIn):
        items = [i.model_dump() for i in body.items]
        for n, item in enumerate(items):
            if item["id"] is None:
                item["id"] = str(n)
        tid = _guard(store.create_task, items, body.alpha, body.annotators)
        return {"task": tid}

    @app.get("/tasks")
    def list_tasks():
        return {"tasks": store.task_ids()}

    @app.get("/tasks/{task_id}")
    def get_task(task_id: str):
        task = _guard(store.task, task_id)
        progress = {
            a: {
                "P1": sum(1 for it in task.items if a in it.t),
                "P2": sum(1 for it in task.items if a in it.t_r),
                "total": len(task.items),
            }
            for a in task.annotators
        }
        return {
            "task": task.id,
            "alpha": task.alpha,
            "status": task.status,
            "annotators": task.annotators,
            "item_count": len(task.items),
            "progress": progress,
        }

    @app.get("/tasks/{task_id}/next")
    def next_item(task_id: str, annotator: str):
        try:
            return _guard(store.next_item, task_id, annotator)
        except TaskComplete:
            return {"task": task_id, "phase": "DONE", "done": True}

    @app.post("/tasks/{task_id}/scores")
    def submit_score(task_id: str, body: ScoreIn):
        ack = _guard(
            store.submit_score, task_id, body.annotator, body.item, body.phase, body.score
        )
        store.maybe_close(task_id)
        return ack

    @app.get("/tasks/{task_id}/report")
    def report(task_id: str):
        return _guard(store.report, task_id)

    if static_dir is not None:
        static_dir = Path(static_dir)

        @app.get("/")
        def index():
            return FileResponse(static_dir / "index.html")

        @app.get("/app.js")
        def app_js():
            return FileResponse(static_dir / "app.js", media_type="text/javascript")

    return app


def serve(store: CmsStore, host: str = "127.0.0.1", port: int = 8700,
          static_dir: str | Path | None = None) -> None:
    import uvicorn

    uvicorn.run(create_app(store, static_dir=static_dir), host=host, port=port)
