#!/usr/bin/env python3
"""Drive the assessor annotation service through a full edit-then-assign
workflow, entirely in process.

The same HTTP surface backs the browser UI; here an in-process test client
plays the assessor. The files the service writes are the exact formats the
scoring pipeline reads.
"""

import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from nuggeteval import formats
from nuggeteval.model import (
    Answer,
    Nugget,
    NuggetSet,
    Provenance,
    QrelRecord,
    QrelsSource,
    Segment,
    Topic,
)
from nuggeteval.scorer import score_strict
from nuggeteval.service import create_app

ws = Path(tempfile.mkdtemp(prefix="nuggeteval-annotation-"))
print("workspace:", ws)

formats.write_topics(ws / "topics.tsv", [Topic("q7", "how do geysers erupt")])
formats.write_segments(ws / "segments.jsonl", [
    Segment("d1", "Groundwater is superheated by magma below."),
    Segment("d2", "Pressure drops trigger explosive boiling."),
])
formats.write_qrels(ws / "qrels_manual.txt", [
    QrelRecord("q7", "d1", 2, QrelsSource.MANUAL),
    QrelRecord("q7", "d2", 1, QrelsSource.MANUAL),
])
# Thirty over-generated drafts await post-editing.
drafts = NuggetSet(
    "q7",
    tuple(Nugget(f"draft nugget {i}") for i in range(30)),
    Provenance.AUTO,
    QrelsSource.MANUAL,
)
formats.write_nugget_sets(ws / "drafts.jsonl", [drafts], {"q7": "how do geysers erupt"})
formats.write_answers(ws / "answers.jsonl", [
    Answer("sys-a", "q7", "Magma heats trapped groundwater until it flashes to steam."),
])

client = TestClient(create_app(ws))

print("\nopen tasks:")
for task in client.get("/tasks").json():
    print(" ", task["task_id"], task["status"])

# The assessor opens the edit task: 30 drafts plus the relevant passages.
payload = client.get("/tasks/edit:q7").json()
print("\nedit task shows", len(payload["drafts"]), "drafts and",
      len(payload["segments"]), "reference segments")

# They keep three facts, label importance, and submit.
final = [
    {"text": "magma superheats groundwater", "importance": "vital"},
    {"text": "pressure drop flashes water to steam", "importance": "vital"},
    {"text": "eruptions recur on a cycle", "importance": "okay"},
]
saved = client.put("/tasks/edit:q7/nuggets",
                   json={"assessor_id": "casey", "nuggets": final}).json()
print("saved nugget set version", saved["version"])

# Finalizing spawned an assignment task, routed to the same assessor.
tasks = client.get("/tasks?assessor=casey&status=open").json()
print("\nnow open for casey:", [t["task_id"] for t in tasks])

body = client.get("/tasks/assign:sys-a:q7").json()
print("assignment screen shows the answer plus", len(body["nuggets"]), "nuggets")

client.put("/tasks/assign:sys-a:q7/assignment",
           json={"assessor_id": "casey",
                 "labels": ["support", "support", "not_support"]})

# The pipeline consumes the service's files directly.
sets, _ = formats.read_nugget_sets(ws / "nuggets.jsonl")
records = formats.read_assignments(ws / "assignments.jsonl")
scores = score_strict(sets[0], records[0])
print("\nscored straight from the annotation workspace:")
print("  a_strict =", round(scores.a_strict, 4), " v_strict =", scores.v_strict)
