"""Blind pairwise annotation: sessions, judgment persistence, HTTP API.

An annotator sees a source sentence and two unlabeled translations and
picks the more literal one. Which system lands on which side is drawn per
task from a seeded RNG and kept server-side only; no client payload ever
carries a system name. Judgments append to a JSONL log that fully
reconstructs server state on restart.
"""

from __future__ import annotations

import json
import os
import random
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Sequence

from pydantic import BaseModel

from .errors import DuplicateJudgmentError, SessionError
from .evalharness import TallySheet, tally_judgments
from .textcore import SegmentRecord


CHOICES = ("left", "right", "equal")


@dataclass(frozen=True)
class AnnotationTask:
    """One pairwise comparison; `assignment` never leaves the server."""

    task_id: str
    index: int
    segment_id: str
    source: str
    left: str
    right: str
    assignment: dict[str, str]  # side -> system name

    def client_payload(self) -> dict:
        return {
            "task_id": self.task_id,
            "source": self.source,
            "left": self.left,
            "right": self.right,
        }


@dataclass(frozen=True)
class Judgment:
    """An annotator's de-randomized decision on one task."""

    task_id: str
    annotator: str
    choice: str
    resolved: str  # "system_a" | "system_b" | "equal"
    timestamp: str

    def to_obj(self) -> dict:
        return {
            "task_id": self.task_id,
            "annotator": self.annotator,
            "choice": self.choice,
            "resolved": self.resolved,
            "timestamp": self.timestamp,
        }


class Session:
    """In-memory session state backed by an append-only judgment log."""

    def __init__(
        self,
        session_id: str,
        systems: tuple[str, str],
        tasks: list[AnnotationTask],
        seed: int,
        storage_dir: Path | None = None,
    ):
        self.session_id = session_id
        self.systems = systems
        self.tasks = tasks
        self.seed = seed
        self._by_task_id = {t.task_id: t for t in tasks}
        self._judgments: dict[tuple[str, str], Judgment] = {}
        self._storage_dir = storage_dir
        self._write_lock = threading.Lock()

    @property
    def total(self) -> int:
        return len(self.tasks)

    def task(self, task_id: str) -> AnnotationTask:
        try:
            return self._by_task_id[task_id]
        except KeyError:
            raise SessionError(f"unknown task {task_id!r}") from None

    def judgments(self) -> list[Judgment]:
        return list(self._judgments.values())

    def done_count(self, annotator: str) -> int:
        # Snapshot first: reads must not race concurrent appends.
        return sum(1 for (_, a) in list(self._judgments) if a == annotator)

    def next_task(self, annotator: str) -> AnnotationTask | None:
        """Lowest-index task this annotator has not judged, or None."""
        for task in self.tasks:
            if (task.task_id, annotator) not in self._judgments:
                return task
        return None

    def resolve(self, task: AnnotationTask, choice: str) -> str:
        if choice == "equal":
            return "equal"
        system = task.assignment[choice]
        return "system_a" if system == self.systems[0] else "system_b"

    def submit_judgment(self, task_id: str, choice: str, annotator: str) -> Judgment:
        """Record one judgment; duplicates for (task, annotator) are rejected."""
        task = self.task(task_id)
        if choice not in CHOICES:
            raise SessionError(f"invalid choice {choice!r}")
        if not annotator:
            raise SessionError("annotator id must be non-empty")
        key = (task_id, annotator)
        with self._write_lock:
            if key in self._judgments:
                raise DuplicateJudgmentError(
                    f"task {task_id!r} already judged by {annotator!r}"
                )
            judgment = Judgment(
                task_id=task_id,
                annotator=annotator,
                choice=choice,
                resolved=self.resolve(task, choice),
                timestamp=datetime.now(timezone.utc).isoformat(),
            )
            if self._storage_dir is not None:
                self._append_judgment(judgment)
            self._judgments[key] = judgment
        return judgment

    def tally(self) -> TallySheet:
        return tally_judgments(self.judgments())

    # -- persistence ------------------------------------------------------

    def _judgment_log_path(self) -> Path:
        return self._storage_dir / "judgments.jsonl"

    def _append_judgment(self, judgment: Judgment) -> None:
        with open(self._judgment_log_path(), "a", encoding="utf-8") as fh:
            fh.write(json.dumps(judgment.to_obj(), ensure_ascii=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def persist(self) -> None:
        """Write session metadata and the full task/assignment table."""
        if self._storage_dir is None:
            raise SessionError("session has no storage directory")
        self._storage_dir.mkdir(parents=True, exist_ok=True)
        meta = {
            "session_id": self.session_id,
            "systems": list(self.systems),
            "seed": self.seed,
            "n_tasks": len(self.tasks),
        }
        (self._storage_dir / "meta.json").write_text(
            json.dumps(meta, ensure_ascii=False, indent=2), encoding="utf-8"
        )
        with open(self._storage_dir / "tasks.jsonl", "w", encoding="utf-8") as fh:
            for t in self.tasks:
                obj = {
                    "task_id": t.task_id,
                    "index": t.index,
                    "segment_id": t.segment_id,
                    "source": t.source,
                    "left": t.left,
                    "right": t.right,
                    "assignment": t.assignment,
                }
                fh.write(json.dumps(obj, ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, storage_dir: str | Path) -> "Session":
        """Rebuild a session from disk, replaying the judgment log."""
        storage_dir = Path(storage_dir)
        meta_path = storage_dir / "meta.json"
        if not meta_path.exists():
            raise SessionError(f"no session at {storage_dir}")
        meta = json.loads(meta_path.read_text(encoding="utf-8"))
        tasks = []
        with open(storage_dir / "tasks.jsonl", encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                tasks.append(
                    AnnotationTask(
                        task_id=obj["task_id"],
                        index=obj["index"],
                        segment_id=obj["segment_id"],
                        source=obj["source"],
                        left=obj["left"],
                        right=obj["right"],
                        assignment=obj["assignment"],
                    )
                )
        tasks.sort(key=lambda t: t.index)
        session = cls(
            session_id=meta["session_id"],
            systems=tuple(meta["systems"]),
            tasks=tasks,
            seed=meta["seed"],
            storage_dir=storage_dir,
        )
        log_path = session._judgment_log_path()
        if log_path.exists():
            with open(log_path, encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    obj = json.loads(line)
                    judgment = Judgment(
                        task_id=obj["task_id"],
                        annotator=obj["annotator"],
                        choice=obj["choice"],
                        resolved=obj["resolved"],
                        timestamp=obj["timestamp"],
                    )
                    session._judgments[(judgment.task_id, judgment.annotator)] = judgment
        return session


def create_session(
    records: Sequence[SegmentRecord],
    systems: Sequence[str],
    sample_size: int,
    seed: int = 0,
    session_id: str = "main",
    storage_dir: str | Path | None = None,
) -> Session:
    """Sample segments and randomize side assignment for a two-system session.

    Only records carrying both systems' translations are eligible. Sampling
    and every per-task side flip come from one RNG seeded with `seed`, so the
    whole session is reproducible.
    """
    systems = tuple(systems)
    if len(systems) != 2 or systems[0] == systems[1]:
        raise SessionError("exactly two distinct systems are required")
    if ":" in session_id:
        raise SessionError("session id must not contain ':'")
    eligible = [
        r for r in records
        if systems[0] in r.translations and systems[1] in r.translations
    ]
    if len(eligible) < sample_size:
        raise SessionError(
            f"only {len(eligible)} records carry both systems, need {sample_size}"
        )
    rng = random.Random(seed)
    sampled = rng.sample(eligible, sample_size)
    tasks = []
    for index, record in enumerate(sampled):
        if rng.random() < 0.5:
            left_sys, right_sys = systems
        else:
            left_sys, right_sys = systems[1], systems[0]
        tasks.append(
            AnnotationTask(
                task_id=f"{session_id}:{index:04d}",
                index=index,
                segment_id=record.id,
                source=record.source.raw,
                left=record.translations[left_sys].raw,
                right=record.translations[right_sys].raw,
                assignment={"left": left_sys, "right": right_sys},
            )
        )
    session = Session(
        session_id, systems, tasks, seed,
        Path(storage_dir) if storage_dir else None,
    )
    if storage_dir is not None:
        session.persist()
    return session


class JudgmentBody(BaseModel):
    """POST /api/judgment request body."""

    task_id: str
    annotator: str
    choice: str


def create_app(sessions: dict[str, Session], ui_dir: str | Path | None = None):
    """FastAPI app exposing the annotation API plus optional static UI files."""
    from fastapi import FastAPI, HTTPException, Query
    from fastapi.responses import HTMLResponse, JSONResponse

    app = FastAPI(title="pairwise literalness annotation")

    def _session(session_id: str) -> Session:
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    @app.get("/api/session/{session_id}/next")
    def next_task(session_id: str, annotator: str = Query(min_length=1)):
        session = _session(session_id)
        progress_done = session.done_count(annotator)
        task = session.next_task(annotator)
        progress = {"done": progress_done, "total": session.total}
        if task is None:
            return {"done": True, "progress": progress}
        payload = task.client_payload()
        payload["progress"] = progress
        return payload

    @app.post("/api/judgment")
    def submit(body: JudgmentBody):
        # Task ids are "<session>:<index>", so the session is recoverable.
        session_id = body.task_id.split(":", 1)[0]
        session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown task {body.task_id!r}")
        try:
            session.task(body.task_id)
        except SessionError as e:
            raise HTTPException(status_code=404, detail=str(e))
        try:
            session.submit_judgment(body.task_id, body.choice, body.annotator)
        except DuplicateJudgmentError as e:
            return JSONResponse(status_code=409, content={"error": str(e)})
        except SessionError as e:
            raise HTTPException(status_code=400, detail=str(e))
        return {"status": "ok", "task_id": body.task_id}

    @app.get("/api/session/{session_id}/tally")
    def tally(session_id: str):
        return _session(session_id).tally().to_obj()

    @app.get("/config.json")
    def config():
        # One configuration endpoint for the UI: API base plus session id.
        first = next(iter(sessions), "main")
        return {"apiBase": "", "session": first}

    if ui_dir is not None and Path(ui_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    else:
        @app.get("/", response_class=HTMLResponse)
        def index():
            return (
                "<html><body><h1>Annotation server</h1>"
                "<p>No UI bundle configured; the JSON API is under /api/.</p>"
                "</body></html>"
            )

    return app
