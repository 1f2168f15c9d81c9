"""HTTP service for assessor workflows.

Backs three task kinds: post-editing drafted nuggets, authoring nuggets from
scratch, and manual three-way assignment of nuggets to answers. Storage is
the workspace's JSONL files plus one task-state index, so artifacts produced
here are byte-compatible with the pipeline's own formats and feed scoring
with zero transformation.

Workspace layout (all files optional unless a task kind needs them)::

    topics.tsv          queries, one per line
    segments.jsonl      corpus passages for reference panels
    qrels_manual.txt    relevance judgments; grade >= 1 segments are shown
    drafts.jsonl        unlabeled draft nugget sets -> edit tasks
    manual_topics.txt   topic ids needing from-scratch nuggets -> create tasks
    answers.jsonl       system answers -> assignment tasks
    nuggets.jsonl       finalized nugget sets (written here)
    assignments.jsonl   manual assignment records (written here)
    nuggets_history.jsonl, assignments_history.jsonl   append-only versions
    task_state.json     status/assessor/version per task
    assessors.json      optional topic_id -> assessor_id routing
"""

from __future__ import annotations

import json
import logging
import threading
from pathlib import Path
from typing import Literal

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from nuggeteval import formats
from nuggeteval.model import (
    Answer,
    Assigner,
    AssignmentLabel,
    AssignmentRecord,
    Importance,
    Nugget,
    NuggetSet,
    Provenance,
    QrelsSource,
    filter_relevant,
)

log = logging.getLogger(__name__)

KIND_EDIT = "edit_nuggets"
KIND_CREATE = "create_nuggets"
KIND_ASSIGN = "assign"

EDIT_CAP = 20


class NuggetIn(BaseModel):
    text: str
    importance: Literal["vital", "okay"]


class NuggetsSubmission(BaseModel):
    assessor_id: str = Field(min_length=1)
    nuggets: list[NuggetIn]


class AssignmentSubmission(BaseModel):
    assessor_id: str = Field(min_length=1)
    labels: list[str]


class AnnotationStore:
    """Filesystem-backed task index; mutations are serialized by one lock."""

    def __init__(self, workspace: str | Path):
        self.workspace = Path(workspace)
        self._lock = threading.Lock()
        self._load()

    # --- loading -----------------------------------------------------------

    def _load(self) -> None:
        ws = self.workspace
        self.topics = {
            t.topic_id: t for t in formats.read_topics(ws / "topics.tsv")
        }
        self.segments = (
            formats.read_segments(ws / "segments.jsonl")
            if (ws / "segments.jsonl").exists()
            else []
        )
        self.qrels = (
            formats.read_qrels(ws / "qrels_manual.txt", QrelsSource.MANUAL)
            if (ws / "qrels_manual.txt").exists()
            else []
        )
        self.drafts: dict[str, NuggetSet] = {}
        if (ws / "drafts.jsonl").exists():
            draft_sets, _ = formats.read_nugget_sets(ws / "drafts.jsonl")
            self.drafts = {ns.topic_id: ns for ns in draft_sets}
        self.manual_topics: list[str] = []
        if (ws / "manual_topics.txt").exists():
            self.manual_topics = [
                line.strip()
                for line in (ws / "manual_topics.txt").read_text().splitlines()
                if line.strip()
            ]
        self.answers: dict[tuple[str, str], Answer] = {}
        if (ws / "answers.jsonl").exists():
            for answer in formats.read_answers(ws / "answers.jsonl"):
                self.answers[(answer.run_id, answer.topic_id)] = answer
        self.finalized: dict[str, NuggetSet] = {}
        if (ws / "nuggets.jsonl").exists():
            final_sets, _ = formats.read_nugget_sets(ws / "nuggets.jsonl")
            self.finalized = {ns.topic_id: ns for ns in final_sets}
        self.assignments: dict[tuple[str, str], AssignmentRecord] = {}
        if (ws / "assignments.jsonl").exists():
            for record in formats.read_assignments(ws / "assignments.jsonl"):
                self.assignments[(record.run_id, record.topic_id)] = record
        self.routing: dict[str, str] = {}
        if (ws / "assessors.json").exists():
            self.routing = json.loads((ws / "assessors.json").read_text())
        self.state: dict = {"tasks": {}, "finalized_by": {}}
        if (ws / "task_state.json").exists():
            self.state = json.loads((ws / "task_state.json").read_text())
            self.state.setdefault("tasks", {})
            self.state.setdefault("finalized_by", {})

    def _save_state(self) -> None:
        (self.workspace / "task_state.json").write_text(
            json.dumps(self.state, ensure_ascii=False, sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )

    # --- task derivation -----------------------------------------------------

    def _task_state(self, task_id: str) -> dict:
        return self.state["tasks"].get(
            task_id, {"status": "open", "assessor_id": None, "version": 0}
        )

    def task_ids(self) -> list[str]:
        ids = [f"edit:{tid}" for tid in sorted(self.drafts)]
        ids += [f"create:{tid}" for tid in sorted(self.manual_topics)]
        ids += [
            f"assign:{run_id}:{topic_id}"
            for run_id, topic_id in sorted(self.answers)
            if topic_id in self.finalized
        ]
        return ids

    def parse_task_id(self, task_id: str) -> tuple[str, str, str | None]:
        """(kind, topic_id, run_id) for a known task id, else KeyError."""
        if task_id not in self.task_ids():
            raise KeyError(task_id)
        head, _, rest = task_id.partition(":")
        if head == "edit":
            return KIND_EDIT, rest, None
        if head == "create":
            return KIND_CREATE, rest, None
        run_id, _, topic_id = rest.partition(":")
        return KIND_ASSIGN, topic_id, run_id

    def routed_assessor(self, task_id: str) -> str | None:
        """The only assessor allowed to see/complete a task, when known.

        Assignment tasks follow the continuity rule: they belong to whoever
        finalized the topic's nuggets. Editing/authoring tasks follow the
        optional routing file.
        """
        kind, topic_id, _ = self.parse_task_id(task_id)
        if kind == KIND_ASSIGN:
            return self.state["finalized_by"].get(topic_id) or self.routing.get(topic_id)
        return self.routing.get(topic_id)

    def summarize(self, task_id: str) -> dict:
        kind, topic_id, run_id = self.parse_task_id(task_id)
        state = self._task_state(task_id)
        summary = {
            "task_id": task_id,
            "kind": kind,
            "topic_id": topic_id,
            "query": self.topics[topic_id].query if topic_id in self.topics else "",
            "status": state["status"],
            "assessor_id": state["assessor_id"],
            "version": state["version"],
        }
        if run_id is not None:
            summary["run_id"] = run_id
        return summary

    def relevant_segments(self, topic_id: str) -> list[dict]:
        wanted = set(filter_relevant(self.qrels, topic_id, min_grade=1))
        return [
            {"segment_id": s.segment_id, "title": s.title, "text": s.text}
            for s in self.segments
            if s.segment_id in wanted
        ]

    def payload(self, task_id: str) -> dict:
        kind, topic_id, run_id = self.parse_task_id(task_id)
        body = self.summarize(task_id)
        body["segments"] = self.relevant_segments(topic_id)
        if kind == KIND_EDIT:
            body["drafts"] = [n.text for n in self.drafts[topic_id].nuggets]
        if kind in (KIND_EDIT, KIND_CREATE) and topic_id in self.finalized:
            body["saved_nuggets"] = [
                {"text": n.text, "importance": n.importance.value}
                for n in self.finalized[topic_id].nuggets
            ]
        if kind == KIND_ASSIGN:
            nugget_set = self.finalized[topic_id]
            answer = self.answers[(run_id, topic_id)]
            body["nuggets"] = [
                {"text": n.text, "importance": n.importance.value}
                for n in nugget_set.nuggets
            ]
            body["answer"] = {"run_id": answer.run_id, "text": answer.text}
            record = self.assignments.get((run_id, topic_id))
            if record is not None and self._task_state(task_id)["status"] == "done":
                body["saved_labels"] = [label.value for label in record.labels]
        return body

    # --- mutations -----------------------------------------------------------

    def save_nuggets(
        self, task_id: str, assessor_id: str, nuggets: list[Nugget]
    ) -> dict:
        with self._lock:
            kind, topic_id, _ = self.parse_task_id(task_id)
            provenance = (
                Provenance.AUTO_EDITED if kind == KIND_EDIT else Provenance.MANUAL
            )
            nugget_set = NuggetSet(
                topic_id=topic_id,
                nuggets=tuple(nuggets),
                provenance=provenance,
                qrels_source=QrelsSource.MANUAL,
            )
            self.finalized[topic_id] = nugget_set
            queries = {topic_id: self.topics[topic_id].query}
            all_queries = {
                tid: self.topics[tid].query if tid in self.topics else ""
                for tid in self.finalized
            }
            all_queries.update(queries)
            formats.write_nugget_sets(
                self.workspace / "nuggets.jsonl",
                list(self.finalized.values()),
                all_queries,
            )
            state = self._task_state(task_id)
            version = state["version"] + 1
            self.state["tasks"][task_id] = {
                "status": "done",
                "assessor_id": assessor_id,
                "version": version,
            }
            self.state["finalized_by"][topic_id] = assessor_id
            self._append_history(
                "nuggets_history.jsonl",
                {
                    "task_id": task_id,
                    "version": version,
                    "assessor_id": assessor_id,
                    **formats.nugget_set_to_obj(nugget_set, all_queries[topic_id]),
                },
            )
            self._save_state()
            return {
                "task_id": task_id,
                "version": version,
                "nugget_set": formats.nugget_set_to_obj(nugget_set, all_queries[topic_id]),
            }

    def save_assignment(
        self, task_id: str, assessor_id: str, labels: list[AssignmentLabel]
    ) -> dict:
        with self._lock:
            _, topic_id, run_id = self.parse_task_id(task_id)
            record = AssignmentRecord(
                run_id=run_id,
                topic_id=topic_id,
                labels=tuple(labels),
                assigner=Assigner.MANUAL,
            )
            self.assignments[(run_id, topic_id)] = record
            formats.write_assignments(
                self.workspace / "assignments.jsonl", list(self.assignments.values())
            )
            state = self._task_state(task_id)
            version = state["version"] + 1
            self.state["tasks"][task_id] = {
                "status": "done",
                "assessor_id": assessor_id,
                "version": version,
            }
            self._append_history(
                "assignments_history.jsonl",
                {
                    "task_id": task_id,
                    "version": version,
                    "assessor_id": assessor_id,
                    "run_id": run_id,
                    "topic_id": topic_id,
                    "labels": [label.value for label in labels],
                },
            )
            self._save_state()
            return {"task_id": task_id, "version": version}

    def _append_history(self, name: str, obj: dict) -> None:
        path = self.workspace / name
        with path.open("a", encoding="utf-8") as fh:
            fh.write(formats.json_line(obj) + "\n")


def _validate_nugget_body(nuggets: list[NuggetIn]) -> list[str]:
    problems = []
    if not nuggets:
        problems.append("nugget list is empty")
    if len(nuggets) > EDIT_CAP:
        problems.append(f"{len(nuggets)} nuggets exceed the cap of {EDIT_CAP}")
    seen: set[str] = set()
    for i, nugget in enumerate(nuggets):
        text = nugget.text.strip()
        if not text:
            problems.append(f"nugget {i} has empty text")
        elif text in seen:
            problems.append(f"nugget {i} duplicates text {text!r}")
        seen.add(text)
    return problems


def create_app(workspace: str | Path, ui_dir: str | Path | None = None) -> FastAPI:
    """Build the annotation service over one condition workspace."""
    store = AnnotationStore(workspace)
    app = FastAPI(title="nugget annotation service")
    app.state.store = store

    @app.get("/tasks")
    def list_tasks(
        assessor: str | None = None, kind: str | None = None, status: str | None = None
    ) -> list[dict]:
        tasks = []
        for task_id in store.task_ids():
            summary = store.summarize(task_id)
            if kind is not None and summary["kind"] != kind:
                continue
            if status is not None and summary["status"] != status:
                continue
            routed = store.routed_assessor(task_id)
            if assessor is not None and routed is not None and routed != assessor:
                continue
            tasks.append(summary)
        return tasks

    @app.get("/tasks/{task_id}")
    def get_task(task_id: str) -> dict:
        try:
            return store.payload(task_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")

    @app.put("/tasks/{task_id}/nuggets")
    def put_nuggets(task_id: str, body: NuggetsSubmission) -> dict:
        try:
            kind, topic_id, _ = store.parse_task_id(task_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        if kind not in (KIND_EDIT, KIND_CREATE):
            raise HTTPException(
                status_code=409, detail=f"task {task_id!r} does not accept nuggets"
            )
        routed = store.routing.get(topic_id)
        if routed is not None and routed != body.assessor_id:
            raise HTTPException(
                status_code=403, detail=f"task {task_id!r} is routed to {routed!r}"
            )
        problems = _validate_nugget_body(body.nuggets)
        if problems:
            raise HTTPException(status_code=422, detail=problems)
        nuggets = [
            Nugget(n.text.strip(), Importance(n.importance)) for n in body.nuggets
        ]
        return store.save_nuggets(task_id, body.assessor_id, nuggets)

    @app.put("/tasks/{task_id}/assignment")
    def put_assignment(task_id: str, body: AssignmentSubmission) -> dict:
        try:
            kind, topic_id, run_id = store.parse_task_id(task_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown task {task_id!r}")
        if kind != KIND_ASSIGN:
            raise HTTPException(
                status_code=409, detail=f"task {task_id!r} does not accept assignments"
            )
        finalizer = store.state["finalized_by"].get(topic_id)
        if finalizer is not None and finalizer != body.assessor_id:
            raise HTTPException(
                status_code=403,
                detail=f"topic {topic_id!r} nuggets were finalized by {finalizer!r}; "
                "the same assessor must assign them",
            )
        expected = len(store.finalized[topic_id].nuggets)
        if len(body.labels) != expected:
            raise HTTPException(
                status_code=422,
                detail=f"expected {expected} labels, got {len(body.labels)}",
            )
        try:
            labels = [AssignmentLabel(value) for value in body.labels]
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return store.save_assignment(task_id, body.assessor_id, labels)

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
