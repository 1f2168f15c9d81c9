#!/usr/bin/env python3
"""Run a whole evaluation condition end to end against a scripted mock.

Builds a two-topic, two-run workspace in a temp directory, scripts the LLM
responses for nugget creation, importance labeling, and assignment, then
executes the fully automatic condition and prints the produced artifacts.
Everything is offline and deterministic: running twice gives identical
manifest hashes.
"""

import json
import tempfile
from pathlib import Path

from nuggeteval import formats, pipeline
from nuggeteval.model import (
    Answer,
    QrelRecord,
    QrelsSource,
    Segment,
    Topic,
)

root = Path(tempfile.mkdtemp(prefix="nuggeteval-demo-"))
print("workspace:", root)

topics = [Topic("q1", "why is the sky blue"), Topic("q2", "how do tides work")]
formats.write_topics(root / "topics.tsv", topics)
formats.write_segments(root / "segments.jsonl", [
    Segment("d1", "Rayleigh scattering sends short wavelengths sideways."),
    Segment("d2", "Blue light scatters more than red in the atmosphere."),
    Segment("d3", "The moon's gravity pulls the ocean into bulges."),
    Segment("d4", "The sun also contributes a smaller tidal force."),
])
formats.write_qrels(root / "qrels.txt", [
    QrelRecord("q1", "d1", 2, QrelsSource.AUTOMATIC),
    QrelRecord("q1", "d2", 1, QrelsSource.AUTOMATIC),
    QrelRecord("q2", "d3", 3, QrelsSource.AUTOMATIC),
    QrelRecord("q2", "d4", 1, QrelsSource.AUTOMATIC),
])
formats.write_answers(root / "answers.jsonl", [
    Answer("sys-a", "q1", "Blue light is scattered most, so the sky looks blue."),
    Answer("sys-a", "q2", "The moon pulls the water, creating two daily bulges."),
    Answer("sys-b", "q1", "Because of the ocean reflecting upward."),
    Answer("sys-b", "q2", "Tides come from wind patterns."),
])

# Scripted playback: per topic one creation and one importance call, then
# one assignment call per (run, topic) pair, in deterministic order.
script = [
    {"match": "why is the sky blue",
     "response": '["blue light scatters most", "scattering favors short wavelengths"]'},
    {"match": "label each of the 2", "response": '["vital", "okay"]'},
    {"match": "how do tides work",
     "response": '["lunar gravity raises ocean bulges", "the sun adds a weaker pull"]'},
    {"match": "label each of the 2", "response": '["vital", "okay"]'},
    {"match": "Blue light is scattered", "response": '["support", "partial_support"]'},
    {"match": "The moon pulls the water", "response": '["support", "not_support"]'},
    {"match": "ocean reflecting", "response": '["not_support", "not_support"]'},
    {"match": "wind patterns", "response": '["not_support", "not_support"]'},
]
(root / "script.json").write_text(json.dumps(script, indent=2))

(root / "config.yaml").write_text(f"""\
out_dir: out
condition:
  nugget_mode: auto
  assign_mode: auto
  qrels_source: automatic
paths:
  topics: topics.tsv
  segments: segments.jsonl
  answers: answers.jsonl
  qrels_automatic: qrels.txt
mock_script: script.json
""")

config = pipeline.load_config(root / "config.yaml")
manifest = pipeline.run_condition(config)

print("\nmanifest for condition", manifest.condition)
for path, digest in manifest.files:
    print(f"  {digest[:12]}  {path}")

print("\nrun scores:")
print((root / "out" / "run_scores.tsv").read_text())

print("re-running is a no-op thanks to resume; hashes stay identical:")
again = pipeline.run_condition(config)
print("  identical:", again.hash_set == manifest.hash_set)
