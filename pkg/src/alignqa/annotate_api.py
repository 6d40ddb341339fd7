"""HTTP service backing the human review of generated QA entries.

Annotators fetch tasks (context, question, answer, plus an "alternate
answer" back-translated from the target language), answer four yes/no
questions, and submit. Judgments persist to an append-only JSON-lines
file with an fsync per write; adjudications are always recomputed from
the stored judgments, so the eval module stays the single source of
truth.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from fastapi import FastAPI, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .dataset import QAEntry
from .errors import MissingAlternateAnswer
from .evaluation import Judgment, adjudicate

DEFAULT_MAX_ANNOTATORS = 3

REVIEW_QUESTIONS = (
    "Does the question make sense outside of the immediate context?",
    "Is the question relevant and/or interesting?",
    "Is the answer to the question correct?",
    'Do "Answer" and "Alternate Answer" mean the same thing?',
)


@dataclass(frozen=True)
class AnnotationTask:
    entry_id: str
    context_en: str
    question_en: str
    answer_en: str
    alternate_answer: str

    def to_json(self) -> dict:
        return {
            "entry_id": self.entry_id,
            "context_en": self.context_en,
            "question_en": self.question_en,
            "answer_en": self.answer_en,
            "alternate_answer": self.alternate_answer,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AnnotationTask":
        return cls(
            entry_id=obj["entry_id"],
            context_en=obj["context_en"],
            question_en=obj["question_en"],
            answer_en=obj["answer_en"],
            alternate_answer=obj["alternate_answer"],
        )


def build_tasks(
    entries: Sequence[QAEntry],
    sample_size: int,
    seed: int,
    alt_answers: dict[str, str],
) -> list[AnnotationTask]:
    """Uniform sample of entries to review, deterministic for a fixed seed."""
    if sample_size > len(entries):
        raise ValueError(f"sample_size {sample_size} exceeds {len(entries)} entries")
    digest = hashlib.sha256(str(seed).encode()).digest()
    rng = random.Random(int.from_bytes(digest[:8], "big"))
    sampled = rng.sample(list(entries), sample_size)
    tasks = []
    for entry in sampled:
        alt = alt_answers.get(entry.id, "").strip()
        if not alt:
            raise MissingAlternateAnswer(f"entry {entry.id} has no alternate answer")
        tasks.append(
            AnnotationTask(
                entry_id=entry.id,
                context_en=entry.context_en,
                question_en=entry.question_en,
                answer_en=entry.answer_en.text,
                alternate_answer=alt,
            )
        )
    return tasks


class JudgmentStore:
    """Append-only judgment log; loads existing judgments on startup."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._judgments: list[Judgment] = []
        self._seen: set[tuple[str, str]] = set()
        if self.path.exists():
            with open(self.path, encoding="utf-8") as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    judgment = Judgment.from_json(json.loads(line))
                    self._judgments.append(judgment)
                    self._seen.add((judgment.annotator_id, judgment.entry_id))

    def add(self, judgment: Judgment) -> bool:
        """Persist a judgment; False when this annotator already judged it."""
        with self._lock:
            key = (judgment.annotator_id, judgment.entry_id)
            if key in self._seen:
                return False
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(json.dumps(judgment.to_json(), ensure_ascii=False) + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._judgments.append(judgment)
            self._seen.add(key)
            return True

    def snapshot(self) -> list[Judgment]:
        with self._lock:
            return list(self._judgments)

    def has_judged(self, annotator_id: str, entry_id: str) -> bool:
        with self._lock:
            return (annotator_id, entry_id) in self._seen

    def counts_by_entry(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        with self._lock:
            for judgment in self._judgments:
                counts[judgment.entry_id] = counts.get(judgment.entry_id, 0) + 1
        return counts


class JudgmentIn(BaseModel):
    entry_id: str
    annotator_id: str = Field(min_length=1)
    answers: list[bool] = Field(min_length=4, max_length=4)


def create_app(
    tasks: Sequence[AnnotationTask],
    store: JudgmentStore,
    max_annotators: int = DEFAULT_MAX_ANNOTATORS,
    static_dir: Path | None = None,
) -> FastAPI:
    app = FastAPI(title="alignqa annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    tasks_by_id = {t.entry_id: t for t in tasks}

    @app.get("/api/questions")
    def questions() -> list[str]:
        return list(REVIEW_QUESTIONS)

    @app.get("/api/tasks/next")
    def next_task(annotator: str = Query(min_length=1)):
        counts = store.counts_by_entry()
        candidates = [
            t
            for t in tasks
            if not store.has_judged(annotator, t.entry_id)
            and counts.get(t.entry_id, 0) < max_annotators
        ]
        judged = sum(1 for t in tasks if store.has_judged(annotator, t.entry_id))
        if not candidates:
            return Response(status_code=204)
        # Least-judged first, entry id as tiebreak, to push every task
        # toward the target annotator count.
        chosen = min(candidates, key=lambda t: (counts.get(t.entry_id, 0), t.entry_id))
        task_json = chosen.to_json()
        task_json["assigned_count"] = counts.get(chosen.entry_id, 0)
        return {
            "task": task_json,
            "progress": {"judged": judged, "total": len(tasks)},
        }

    @app.get("/api/progress")
    def progress(annotator: str = Query(min_length=1)):
        judged = sum(1 for t in tasks if store.has_judged(annotator, t.entry_id))
        return {"judged": judged, "total": len(tasks)}

    @app.post("/api/judgments", status_code=201)
    def post_judgment(payload: JudgmentIn):
        if payload.entry_id not in tasks_by_id:
            return JSONResponse(
                status_code=422,
                content={"error": "UnknownTask", "entry_id": payload.entry_id},
            )
        judgment = Judgment(
            entry_id=payload.entry_id,
            annotator_id=payload.annotator_id,
            answers=tuple(payload.answers),
        )
        if not store.add(judgment):
            return JSONResponse(
                status_code=409,
                content={"error": "DuplicateJudgment", "entry_id": payload.entry_id},
            )
        return {"status": "stored"}

    @app.get("/api/adjudications")
    def adjudications() -> list[dict]:
        return [adj.to_json() for adj in adjudicate(store.snapshot())]

    @app.get("/api/export")
    def export() -> PlainTextResponse:
        body = "".join(
            json.dumps(j.to_json(), ensure_ascii=False) + "\n" for j in store.snapshot()
        )
        return PlainTextResponse(body, media_type="application/x-ndjson")

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app
