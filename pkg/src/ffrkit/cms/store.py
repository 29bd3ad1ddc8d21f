"""Two-phase CMS annotation state with an append-only JSONL event log.

Every mutation is an event; replaying the log reconstructs the exact live
state. Phase 1 (score without the reference) must be complete for ALL of
an annotator's items before any phase-2 view reveals a reference.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import (
    CorruptLine,
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
from ..metrics import cms_total

P1, P2 = "P1", "P2"


@dataclass
class CmsItem:
    id: str
    source: str
    prediction: str
    reference: str
    # annotator -> score, per phase
    t: dict[str, float] = field(default_factory=dict)
    t_r: dict[str, float] = field(default_factory=dict)


@dataclass
class CmsTask:
    id: str
    alpha: float
    items: list[CmsItem]
    annotators: list[str]
    status: str = "OPEN"

    def item(self, item_id: str) -> CmsItem:
        for it in self.items:
            if it.id == item_id:
                return it
        raise UnknownItem(item_id)


class CmsStore:
    """In-memory task store; mutations serialize through one lock and are
    appended to the event log before the state updates become visible."""

    def __init__(self, log_path: str | Path | None = None):
        self._tasks: dict[str, CmsTask] = {}
        self._lock = threading.Lock()
        self._log_path = Path(log_path) if log_path else None
        if self._log_path and self._log_path.exists():
            self._replay_into_self(self._log_path)

    # -- event plumbing ---------------------------------------------------
    def _append(self, event: dict) -> None:
        if self._log_path is None:
            return
        with self._log_path.open("a", encoding="utf-8", newline="\n") as f:
            f.write(json.dumps(event, ensure_ascii=False) + "\n")

    def _replay_into_self(self, path: Path) -> None:
        for i, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            try:
                event = json.loads(line)
            except json.JSONDecodeError as e:
                raise CorruptLine(i, str(e)) from e
            try:
                self._apply(event)
            except KeyError as e:
                raise CorruptLine(i, f"missing field {e}") from e

    def _apply(self, event: dict) -> None:
        kind = event["kind"]
        if kind == "task_created":
            items = [CmsItem(**{k: d[k] for k in ("id", "source", "prediction", "reference")})
                     for d in event["items"]]
            self._tasks[event["task"]] = CmsTask(
                id=event["task"],
                alpha=event["alpha"],
                items=items,
                annotators=list(event["annotators"]),
            )
        elif kind == "score_submitted":
            task = self._tasks[event["task"]]
            item = task.item(event["item"])
            target = item.t if event["phase"] == P1 else item.t_r
            target[event["annotator"]] = event["score"]
        elif kind == "task_closed":
            self._tasks[event["task"]].status = "CLOSED"
        else:
            raise KeyError(f"unknown event kind {kind!r}")

    # -- operations ---------------------------------------------------------
    def create_task(
        self,
        items: list[dict],
        alpha: float = 0.7,
        annotators: list[str] | None = None,
        task_id: str | None = None,
    ) -> str:
        if not items:
            raise EmptyTask("a task needs at least one item")
        if not 0.0 <= alpha <= 1.0:
            raise OutOfRange(f"alpha must be in [0,1], got {alpha}")
        if annotators is None:
            annotators = [f"annotator-{i + 1}" for i in range(5)]
        ids = []
        for i, d in enumerate(items):
            for fld in ("source", "prediction", "reference"):
                if not d.get(fld):
                    raise EmptyTask(f"item {i} missing {fld}")
            ids.append(str(d.get("id", i)))
        if len(set(ids)) != len(ids):
            raise DuplicateItemId("item ids must be unique")

        with self._lock:
            tid = task_id or uuid.uuid4().hex[:12]
            event = {
                "kind": "task_created",
                "ts": time.time(),
                "task": tid,
                "alpha": alpha,
                "annotators": annotators,
                "items": [
                    {
                        "id": iid,
                        "source": d["source"],
                        "prediction": d["prediction"],
                        "reference": d["reference"],
                    }
                    for iid, d in zip(ids, items)
                ],
            }
            self._append(event)
            self._apply(event)
            return tid

    def task(self, task_id: str) -> CmsTask:
        try:
            return self._tasks[task_id]
        except KeyError:
            raise UnknownTask(task_id) from None

    def task_ids(self) -> list[str]:
        return list(self._tasks)

    def _phase_of(self, task: CmsTask, annotator: str) -> str:
        if all(annotator in it.t for it in task.items):
            return P2
        return P1

    def next_item(self, task_id: str, annotator: str) -> dict:
        """Next unscored item view for this annotator, in task order.

        Phase-1 views never contain the reference; phase-2 views include it
        plus the annotator's frozen phase-1 score.
        """
        with self._lock:
            task = self.task(task_id)
            if annotator not in task.annotators:
                raise UnknownAnnotator(annotator)
            phase = self._phase_of(task, annotator)
            scored = (lambda it: annotator in it.t) if phase == P1 else (
                lambda it: annotator in it.t_r
            )
            for it in task.items:
                if not scored(it):
                    view = {
                        "task": task.id,
                        "item": it.id,
                        "phase": phase,
                        "source": it.source,
                        "prediction": it.prediction,
                    }
                    if phase == P2:
                        view["reference"] = it.reference
                        view["t"] = it.t[annotator]
                    return view
            raise TaskComplete(f"{annotator} has finished both phases")

    def submit_score(
        self, task_id: str, annotator: str, item_id: str, phase: str, score: float
    ) -> dict:
        if phase not in (P1, P2):
            raise PhaseViolation(f"phase must be P1|P2, got {phase!r}")
        if not isinstance(score, (int, float)) or not 0.0 <= score <= 1.0:
            raise OutOfRange(f"score must be in [0,1], got {score}")
        with self._lock:
            task = self.task(task_id)
            if annotator not in task.annotators:
                raise UnknownAnnotator(annotator)
            item = task.item(item_id)
            current = self._phase_of(task, annotator)
            if phase == P2:
                if current != P2:
                    raise PhaseViolation(
                        "phase 1 must be complete for all items before phase 2"
                    )
                if annotator in item.t_r:
                    raise DuplicateSubmission(f"{annotator} already scored {item_id} in P2")
            else:
                if current != P1 or annotator in item.t:
                    raise DuplicateSubmission(f"{annotator} already scored {item_id} in P1")
            event = {
                "kind": "score_submitted",
                "ts": time.time(),
                "task": task_id,
                "annotator": annotator,
                "item": item_id,
                "phase": phase,
                "score": float(score),
            }
            self._append(event)
            self._apply(event)
            return {"task": task_id, "item": item_id, "phase": phase, "score": float(score)}

    def report(self, task_id: str) -> dict:
        """Per-item and task-level CMS with annotator coverage; partial
        coverage is flagged, not an error."""
        with self._lock:
            task = self.task(task_id)
            items_out = []
            item_means = []
            for it in task.items:
                totals = {
                    a: cms_total(it.t[a], it.t_r[a], task.alpha)
                    for a in task.annotators
                    if a in it.t and a in it.t_r
                }
                complete = len(totals) == len(task.annotators)
                cms = sum(totals.values()) / len(totals) if totals else None
                if cms is not None:
                    item_means.append(cms)
                items_out.append(
                    {
                        "item": it.id,
                        "t_total": totals,
                        "cms": cms,
                        "complete": complete,
                        "coverage": {
                            a: {"P1": a in it.t, "P2": a in it.t_r}
                            for a in task.annotators
                        },
                    }
                )
            return {
                "task": task.id,
                "alpha": task.alpha,
                "status": task.status,
                "annotators": task.annotators,
                "items": items_out,
                "task_cms": sum(item_means) / len(item_means) if item_means else None,
                "complete": all(i["complete"] for i in items_out),
            }

    def maybe_close(self, task_id: str) -> bool:
        """Close the task once every annotator has scored both phases
        on every item."""
        with self._lock:
            task = self.task(task_id)
            done = all(
                a in it.t and a in it.t_r
                for it in task.items
                for a in task.annotators
            )
            if done and task.status == "OPEN":
                event = {"kind": "task_closed", "ts": time.time(), "task": task_id}
                self._append(event)
                self._apply(event)
            return done

    def snapshot(self) -> dict:
        """Comparable view of full state (for replay-equivalence checks)."""
        return {
            tid: {
                "alpha": t.alpha,
                "annotators": list(t.annotators),
                "status": t.status,
                "items": [
                    {
                        "id": it.id,
                        "source": it.source,
                        "prediction": it.prediction,
                        "reference": it.reference,
                        "t": dict(it.t),
                        "t_r": dict(it.t_r),
                    }
                    for it in t.items
                ],
            }
            for tid, t in self._tasks.items()
        }


def replay(log_path: str | Path) -> CmsStore:
    """Rebuild a store purely from its event log."""
    store = CmsStore(log_path=None)
    path = Path(log_path)
    if path.exists():
        store._replay_into_self(path)
    return store
