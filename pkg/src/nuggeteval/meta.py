"""Meta-evaluation: rank agreement between two scoring conditions.

Kendall's tau-b (tie-corrected) is computed at three granularities: over run
means, averaged within topics, and over every (run, topic) observation as an
independent point. Assignment agreement between a manual and an automatic
labeling of the same pairs is summarized as a 3x3 confusion matrix.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from scipy.stats import kendalltau

from nuggeteval.errors import AlignmentError, CorrelationError, EmptyInputError
from nuggeteval.model import AssignmentLabel, AssignmentRecord, TopicScores

log = logging.getLogger(__name__)

#: Row/column order of confusion matrices.
CONFUSION_LABEL_ORDER: tuple[AssignmentLabel, ...] = (
    AssignmentLabel.SUPPORT,
    AssignmentLabel.PARTIAL_SUPPORT,
    AssignmentLabel.NOT_SUPPORT,
)


@dataclass(frozen=True)
class ScoreMatrix:
    """Scores of one condition and metric, keyed by (run_id, topic_id)."""

    condition: str
    metric: str
    entries: Mapping[tuple[str, str], float]

    @classmethod
    def from_topic_scores(
        cls, scores: Sequence[TopicScores], metric: str, condition: str
    ) -> "ScoreMatrix":
        """Build a matrix from per-topic scores, skipping undefined values."""
        if metric not in ("a_strict", "v_strict"):
            raise ValueError(f"unknown metric {metric!r}")
        entries: dict[tuple[str, str], float] = {}
        for score in scores:
            value = score.a_strict if metric == "a_strict" else score.v_strict
            if value is None:
                continue
            key = (score.run_id, score.topic_id)
            if key in entries:
                raise ValueError(f"duplicate (run, topic) key {key}")
            entries[key] = value
        return cls(condition=condition, metric=metric, entries=entries)

    def runs(self) -> set[str]:
        return {run_id for run_id, _ in self.entries}

    def topics(self) -> set[str]:
        return {topic_id for _, topic_id in self.entries}

    def run_means(self) -> dict[str, float]:
        """Per-run mean over the topics present for that run."""
        sums: dict[str, float] = {}
        counts: dict[str, int] = {}
        for (run_id, _), value in self.entries.items():
            sums[run_id] = sums.get(run_id, 0.0) + value
            counts[run_id] = counts.get(run_id, 0) + 1
        return {run_id: sums[run_id] / counts[run_id] for run_id in sums}


def kendall_tau_b(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Tie-corrected rank correlation in [-1, 1].

    Returns None when the statistic is undefined (one vector entirely tied).
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    if len(x) < 2:
        raise ValueError("need at least 2 observations")
    if len(set(x)) == 1 or len(set(y)) == 1:
        return None
    statistic = kendalltau(list(x), list(y), variant="b").statistic
    if math.isnan(statistic):
        return None
    return float(statistic)


def run_level_correlation(a: ScoreMatrix, b: ScoreMatrix) -> float | None:
    """Tau over run means: average topic scores per run, then correlate."""
    means_a = a.run_means()
    means_b = b.run_means()
    shared = sorted(set(means_a) & set(means_b))
    if len(shared) < 2:
        raise CorrelationError(
            f"need >= 2 shared runs, have {len(shared)} "
            f"({a.condition!r} vs {b.condition!r})"
        )
    return kendall_tau_b([means_a[r] for r in shared], [means_b[r] for r in shared])


@dataclass(frozen=True)
class PerTopicCorrelation:
    """Average of within-topic correlations, with skip accounting."""

    avg_tau: float | None
    topics_used: int
    topics_skipped: int
    taus: Mapping[str, float] = field(default_factory=dict)


def per_topic_avg_correlation(a: ScoreMatrix, b: ScoreMatrix) -> PerTopicCorrelation:
    """Tau across runs within each shared topic, averaged over topics.

    Topics where tau is undefined (fewer than two shared runs, or all scores
    tied on one side) are skipped and counted.
    """
    shared_topics = sorted(a.topics() & b.topics())
    taus: dict[str, float] = {}
    skipped = 0
    for topic_id in shared_topics:
        runs = sorted(
            {r for r, t in a.entries if t == topic_id}
            & {r for r, t in b.entries if t == topic_id}
        )
        if len(runs) < 2:
            skipped += 1
            continue
        tau = kendall_tau_b(
            [a.entries[(r, topic_id)] for r in runs],
            [b.entries[(r, topic_id)] for r in runs],
        )
        if tau is None:
            skipped += 1
            continue
        taus[topic_id] = tau
    if not taus:
        log.warning(
            "no topic yields a defined correlation (%s vs %s)",
            a.condition,
            b.condition,
        )
        return PerTopicCorrelation(avg_tau=None, topics_used=0, topics_skipped=skipped)
    return PerTopicCorrelation(
        avg_tau=sum(taus.values()) / len(taus),
        topics_used=len(taus),
        topics_skipped=skipped,
        taus=taus,
    )


def all_pairs_correlation(a: ScoreMatrix, b: ScoreMatrix) -> float | None:
    """Tau treating every shared (run, topic) score as one observation."""
    shared = sorted(set(a.entries) & set(b.entries))
    if len(shared) < 2:
        raise CorrelationError(
            f"need >= 2 shared (run, topic) keys, have {len(shared)}"
        )
    return kendall_tau_b(
        [a.entries[key] for key in shared], [b.entries[key] for key in shared]
    )


@dataclass(frozen=True)
class ConfusionMatrix3:
    """3x3 agreement counts indexed (manual label, automatic label).

    Row/column order follows CONFUSION_LABEL_ORDER; percentages are counts
    normalized by the total number of aligned pairs.
    """

    counts: tuple[tuple[int, int, int], ...]
    percentages: tuple[tuple[float, float, float], ...]
    total: int

    @property
    def diagonal_pct(self) -> float:
        return sum(self.percentages[i][i] for i in range(3))


def confusion_matrix(
    manual: Sequence[AssignmentRecord], auto: Sequence[AssignmentRecord]
) -> ConfusionMatrix3:
    """Count aligned (manual, automatic) label pairs over all positions.

    Records are aligned on (run_id, topic_id); both sides must cover the same
    pairs with equal label counts, else the offenders are reported.
    """
    manual_by_key = {(r.run_id, r.topic_id): r for r in manual}
    auto_by_key = {(r.run_id, r.topic_id): r for r in auto}
    offenders = sorted(set(manual_by_key) ^ set(auto_by_key))
    if offenders:
        raise AlignmentError(f"records not aligned on (run, topic): {offenders}")
    length_mismatches = sorted(
        key
        for key in manual_by_key
        if len(manual_by_key[key].labels) != len(auto_by_key[key].labels)
    )
    if length_mismatches:
        raise AlignmentError(f"label-count mismatch for: {length_mismatches}")
    if not manual_by_key:
        raise EmptyInputError("no aligned records")

    index = {label: i for i, label in enumerate(CONFUSION_LABEL_ORDER)}
    counts = [[0, 0, 0], [0, 0, 0], [0, 0, 0]]
    for key in manual_by_key:
        for m_label, a_label in zip(manual_by_key[key].labels, auto_by_key[key].labels):
            counts[index[m_label]][index[a_label]] += 1
    total = sum(sum(row) for row in counts)
    if total == 0:
        raise EmptyInputError("aligned records carry no labels")
    percentages = tuple(
        tuple(100.0 * cell / total for cell in row) for row in counts
    )
    return ConfusionMatrix3(
        counts=tuple(tuple(row) for row in counts),
        percentages=percentages,  # type: ignore[arg-type]
        total=total,
    )
