"""Automatic nugget assignment.

For each (answer, nugget set) pair, the LLM labels every nugget support,
partial_support, or not_support, judging the answer text as the passage.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Sequence

from nuggeteval.config import StageConfig
from nuggeteval.errors import NuggetEvalError
from nuggeteval.gateway.client import LLMClient, complete_parsed
from nuggeteval.gateway.parsing import parse_label_list, serialize_string_list
from nuggeteval.gateway.templates import render_template
from nuggeteval.model import (
    Answer,
    Assigner,
    AssignmentLabel,
    AssignmentRecord,
    NuggetSet,
    Topic,
)

log = logging.getLogger(__name__)

ASSIGNMENT_LABELS = {label.value for label in AssignmentLabel}


def assign(
    topic: Topic,
    nugget_set: NuggetSet,
    answer: Answer,
    client: LLMClient,
    cfg: StageConfig = StageConfig(),
) -> AssignmentRecord:
    """Label every nugget of one topic against one answer.

    Nuggets are sent in consecutive batches of at most ``cfg.caps.nugget_batch``;
    each batch must come back with exactly one allowed label per nugget or the
    pair fails with a typed error. Default labels are never substituted.
    """
    if answer.topic_id != nugget_set.topic_id or topic.topic_id != nugget_set.topic_id:
        raise ValueError(
            f"topic mismatch: answer {answer.topic_id!r}, "
            f"nuggets {nugget_set.topic_id!r}, topic {topic.topic_id!r}"
        )
    texts = [n.text for n in nugget_set.nuggets]
    labels: list[AssignmentLabel] = []
    for start in range(0, len(texts), cfg.caps.nugget_batch):
        batch = texts[start : start + cfg.caps.nugget_batch]
        request = render_template(
            "assign",
            {
                "query": topic.query,
                "passage": answer.text,
                "nugget_count": str(len(batch)),
                "nuggets": serialize_string_list(batch),
            },
            decode=cfg.decode,
        )
        raw = complete_parsed(
            request,
            client,
            lambda text, n=len(batch): parse_label_list(text, n, ASSIGNMENT_LABELS),
            cfg.retry,
        )
        labels.extend(AssignmentLabel(value) for value in raw)
    return AssignmentRecord(
        run_id=answer.run_id,
        topic_id=answer.topic_id,
        labels=tuple(labels),
        assigner=Assigner.AUTO,
    )


@dataclass(frozen=True, slots=True)
class PairFailure:
    """One (run, topic) pair that could not be labeled."""

    run_id: str
    topic_id: str
    error: str


@dataclass(frozen=True, slots=True)
class AssignmentBatch:
    """All records produced for a batch, plus per-pair failures."""

    records: tuple[AssignmentRecord, ...]
    failures: tuple[PairFailure, ...]


def assign_all(
    topics: Mapping[str, Topic],
    nugget_sets: Mapping[str, NuggetSet],
    answers: Sequence[Answer],
    client: LLMClient,
    cfg: StageConfig = StageConfig(),
    existing: Sequence[AssignmentRecord] = (),
) -> AssignmentBatch:
    """Assign every answer against its topic's nugget set.

    Pairs already present in ``existing`` are skipped (resume), merged into
    the output unchanged. A failing pair is recorded and does not abort the
    batch. Output is sorted by (run_id, topic_id) regardless of execution
    order.
    """
    for answer in answers:
        if answer.topic_id not in nugget_sets:
            raise ValueError(f"no nugget set for topic {answer.topic_id!r}")
        if answer.topic_id not in topics:
            raise ValueError(f"unknown topic {answer.topic_id!r}")

    done = {(r.run_id, r.topic_id): r for r in existing}
    todo = [a for a in answers if (a.run_id, a.topic_id) not in done]

    def work(answer: Answer) -> AssignmentRecord:
        return assign(
            topics[answer.topic_id],
            nugget_sets[answer.topic_id],
            answer,
            client,
            cfg,
        )

    records: dict[tuple[str, str], AssignmentRecord] = dict(done)
    failures: list[PairFailure] = []
    if cfg.workers == 1:
        outcomes = [(a, _attempt(work, a)) for a in todo]
    else:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = pool.map(lambda a: _attempt(work, a), todo)
            outcomes = list(zip(todo, results))
    for answer, outcome in outcomes:
        if isinstance(outcome, PairFailure):
            failures.append(outcome)
            log.warning(
                "assignment failed for (%s, %s): %s",
                outcome.run_id,
                outcome.topic_id,
                outcome.error,
            )
        else:
            records[(answer.run_id, answer.topic_id)] = outcome

    ordered = tuple(records[key] for key in sorted(records))
    return AssignmentBatch(
        records=ordered,
        failures=tuple(sorted(failures, key=lambda f: (f.run_id, f.topic_id))),
    )


def _attempt(work, answer: Answer) -> AssignmentRecord | PairFailure:
    try:
        return work(answer)
    except NuggetEvalError as exc:
        return PairFailure(answer.run_id, answer.topic_id, f"{type(exc).__name__}: {exc}")
