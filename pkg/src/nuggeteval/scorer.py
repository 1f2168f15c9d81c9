"""Strict recall scoring and descriptive statistics.

A nugget counts only when fully supported: partial support contributes
nothing. The all-nuggets score divides by the topic's nugget count, the
vital-only score by its vital count; either is undefined (None) when its
denominator is zero. Run scores are plain means over topics with defined
values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from nuggeteval.errors import AlignmentError, EmptyInputError
from nuggeteval.model import (
    AssignmentLabel,
    AssignmentRecord,
    EvalCondition,
    Importance,
    NuggetSet,
    RunScores,
    TopicScores,
)

log = logging.getLogger(__name__)


def score_strict(nugget_set: NuggetSet, record: AssignmentRecord) -> TopicScores:
    """Strict per-topic scores for one (run, topic) pair."""
    if record.topic_id != nugget_set.topic_id:
        raise AlignmentError(
            f"record topic {record.topic_id!r} != nugget set topic "
            f"{nugget_set.topic_id!r}"
        )
    if len(record.labels) != len(nugget_set.nuggets):
        raise AlignmentError(
            f"topic {record.topic_id!r}: {len(record.labels)} labels for "
            f"{len(nugget_set.nuggets)} nuggets"
        )
    n_nuggets = len(nugget_set.nuggets)
    n_vital = nugget_set.n_vital
    supported = 0
    supported_vital = 0
    for nugget, label in zip(nugget_set.nuggets, record.labels):
        if label is AssignmentLabel.SUPPORT:
            supported += 1
            if nugget.importance is Importance.VITAL:
                supported_vital += 1
    return TopicScores(
        run_id=record.run_id,
        topic_id=record.topic_id,
        a_strict=supported / n_nuggets if n_nuggets else None,
        v_strict=supported_vital / n_vital if n_vital else None,
        n_nuggets=n_nuggets,
        n_vital=n_vital,
    )


def score_run(topic_scores: Sequence[TopicScores]) -> RunScores:
    """Run-level means over the topics with defined scores."""
    if not topic_scores:
        raise EmptyInputError("no topic scores to aggregate")
    run_ids = {s.run_id for s in topic_scores}
    if len(run_ids) != 1:
        raise ValueError(f"topic scores span multiple runs: {sorted(run_ids)}")
    run_id = topic_scores[0].run_id

    a_values = [s.a_strict for s in topic_scores if s.a_strict is not None]
    v_values = [s.v_strict for s in topic_scores if s.v_strict is not None]
    if not a_values:
        log.warning("run %s: no topics with a defined all-nuggets score", run_id)
    if not v_values:
        log.warning("run %s: no topics with a defined vital-only score", run_id)
    return RunScores(
        run_id=run_id,
        mean_a_strict=sum(a_values) / len(a_values) if a_values else None,
        mean_v_strict=sum(v_values) / len(v_values) if v_values else None,
        topics_counted_a=len(a_values),
        topics_counted_v=len(v_values),
    )


@dataclass(frozen=True, slots=True)
class DescriptiveStats:
    """Per-condition summary of nugget shape and assignment outcomes.

    Importance percentages are over labeled nuggets; assignment percentages
    are over all (answer, nugget) pairs. Each group sums to 100.
    """

    condition: str
    n_topics: int
    avg_nuggets_per_topic: float
    avg_nugget_length_words: float
    pct_vital: float
    pct_okay: float
    pct_not_support: float
    pct_partial_support: float
    pct_support: float


def descriptive_stats(
    nugget_sets: Sequence[NuggetSet],
    records: Sequence[AssignmentRecord],
    condition: EvalCondition | str,
) -> DescriptiveStats:
    """Compute the summary table for one evaluation condition."""
    if not nugget_sets:
        raise EmptyInputError("no nugget sets")
    if not records:
        raise EmptyInputError("no assignment records")

    all_nuggets = [n for ns in nugget_sets for n in ns.nuggets]
    if not all_nuggets:
        raise EmptyInputError("nugget sets are all empty")
    labeled = [n for n in all_nuggets if n.importance is not Importance.UNLABELED]
    if not labeled:
        raise EmptyInputError("no vital/okay labels to summarize")

    n_vital = sum(1 for n in labeled if n.importance is Importance.VITAL)
    all_labels = [label for r in records for label in r.labels]
    if not all_labels:
        raise EmptyInputError("assignment records carry no labels")
    tally = {label: 0 for label in AssignmentLabel}
    for label in all_labels:
        tally[label] += 1

    return DescriptiveStats(
        condition=condition.label if isinstance(condition, EvalCondition) else condition,
        n_topics=len(nugget_sets),
        avg_nuggets_per_topic=len(all_nuggets) / len(nugget_sets),
        avg_nugget_length_words=sum(n.word_count for n in all_nuggets) / len(all_nuggets),
        pct_vital=100.0 * n_vital / len(labeled),
        pct_okay=100.0 * (len(labeled) - n_vital) / len(labeled),
        pct_not_support=100.0 * tally[AssignmentLabel.NOT_SUPPORT] / len(all_labels),
        pct_partial_support=100.0 * tally[AssignmentLabel.PARTIAL_SUPPORT] / len(all_labels),
        pct_support=100.0 * tally[AssignmentLabel.SUPPORT] / len(all_labels),
    )
