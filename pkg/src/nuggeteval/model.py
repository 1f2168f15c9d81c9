"""Core domain types for nugget-based answer evaluation.

All types are immutable values; collections are stored as tuples so instances
can be shared freely between worker threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

_ASCII_WS = re.compile(r"[ \t\r\n\f\v]+")


def word_count(text: str) -> int:
    """Number of ASCII-whitespace-separated tokens in ``text``."""
    return sum(1 for token in _ASCII_WS.split(text) if token)


class Importance(str, Enum):
    """Importance class of a nugget: vital facts must appear in a good answer."""

    VITAL = "vital"
    OKAY = "okay"
    UNLABELED = "unlabeled"


class AssignmentLabel(str, Enum):
    """Three-way judgment of whether an answer captures a nugget."""

    SUPPORT = "support"
    PARTIAL_SUPPORT = "partial_support"
    NOT_SUPPORT = "not_support"


class Provenance(str, Enum):
    """How a nugget set came to be."""

    AUTO = "auto"
    AUTO_EDITED = "auto_edited"
    MANUAL = "manual"


class QrelsSource(str, Enum):
    """Who produced the relevance judgments feeding nugget creation."""

    MANUAL = "manual"
    AUTOMATIC = "automatic"


class Assigner(str, Enum):
    """Who produced an assignment record."""

    AUTO = "auto"
    MANUAL = "manual"


# Caps used when validating nugget sets. Draft sets are deliberately
# over-generated; finalized sets are trimmed to the working size.
DRAFT_CAP = 30
FINAL_CAP = 20


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ValueError(message)


@dataclass(frozen=True, slots=True)
class Topic:
    """A query under evaluation."""

    topic_id: str
    query: str

    def __post_init__(self) -> None:
        _require(bool(self.topic_id), "topic_id must be non-empty")
        _require(bool(self.query), "query must be non-empty")


@dataclass(frozen=True, slots=True)
class Segment:
    """A corpus passage, the raw material for nugget creation."""

    segment_id: str
    text: str
    title: str | None = None

    def __post_init__(self) -> None:
        _require(bool(self.segment_id), "segment_id must be non-empty")
        _require(bool(self.text), "segment text must be non-empty")


@dataclass(frozen=True, slots=True)
class QrelRecord:
    """Graded relevance of one segment for one topic."""

    topic_id: str
    segment_id: str
    grade: int
    source: QrelsSource

    def __post_init__(self) -> None:
        _require(bool(self.topic_id), "topic_id must be non-empty")
        _require(bool(self.segment_id), "segment_id must be non-empty")
        _require(0 <= self.grade <= 3, f"grade must be in [0, 3], got {self.grade}")


@dataclass(frozen=True, slots=True)
class Nugget:
    """An atomic fact an answer either contains or does not."""

    text: str
    importance: Importance = Importance.UNLABELED

    def __post_init__(self) -> None:
        _require(bool(self.text), "nugget text must be non-empty")

    @property
    def word_count(self) -> int:
        return word_count(self.text)


@dataclass(frozen=True, slots=True)
class NuggetSet:
    """Ordered nugget list for one topic.

    Size and ordering rules are checked by :func:`validate_nugget_set`, not by
    the constructor, so that malformed sets can be represented and reported.
    """

    topic_id: str
    nuggets: tuple[Nugget, ...]
    provenance: Provenance
    qrels_source: QrelsSource

    def __post_init__(self) -> None:
        _require(bool(self.topic_id), "topic_id must be non-empty")
        object.__setattr__(self, "nuggets", tuple(self.nuggets))

    def __len__(self) -> int:
        return len(self.nuggets)

    @property
    def is_draft(self) -> bool:
        """Draft sets still carry unlabeled nuggets awaiting assessor review."""
        return any(n.importance is Importance.UNLABELED for n in self.nuggets)

    @property
    def n_vital(self) -> int:
        return sum(1 for n in self.nuggets if n.importance is Importance.VITAL)


@dataclass(frozen=True, slots=True)
class Answer:
    """One system's response text for one (run, topic) pair."""

    run_id: str
    topic_id: str
    text: str

    def __post_init__(self) -> None:
        _require(bool(self.run_id), "run_id must be non-empty")
        _require(bool(self.topic_id), "topic_id must be non-empty")
        _require(bool(self.text), "answer text must be non-empty")

    @property
    def word_count(self) -> int:
        return word_count(self.text)


@dataclass(frozen=True, slots=True)
class AssignmentRecord:
    """Per-nugget support labels for one (run, topic) pair.

    Alignment is positional: ``labels[i]`` refers to nugget ``i`` of the
    topic's nugget set.
    """

    run_id: str
    topic_id: str
    labels: tuple[AssignmentLabel, ...]
    assigner: Assigner

    def __post_init__(self) -> None:
        _require(bool(self.run_id), "run_id must be non-empty")
        _require(bool(self.topic_id), "topic_id must be non-empty")
        object.__setattr__(self, "labels", tuple(self.labels))


@dataclass(frozen=True, slots=True)
class TopicScores:
    """Strict scores for one (run, topic) pair.

    ``None`` marks an undefined score (no nuggets / no vital nuggets); it is
    never conflated with 0.0 so aggregation cannot silently include it.
    """

    run_id: str
    topic_id: str
    a_strict: float | None
    v_strict: float | None
    n_nuggets: int
    n_vital: int

    def __post_init__(self) -> None:
        _require(
            (self.a_strict is not None) == (self.n_nuggets > 0),
            "a_strict must be defined iff the topic has nuggets",
        )
        _require(
            (self.v_strict is not None) == (self.n_vital > 0),
            "v_strict must be defined iff the topic has vital nuggets",
        )


@dataclass(frozen=True, slots=True)
class RunScores:
    """Run-level means over topics with defined scores."""

    run_id: str
    mean_a_strict: float | None
    mean_v_strict: float | None
    topics_counted_a: int
    topics_counted_v: int


@dataclass(frozen=True, slots=True)
class EvalCondition:
    """One evaluation strategy: nugget mode x assignment mode x qrels source."""

    nugget_mode: Provenance
    assign_mode: Assigner
    qrels_source: QrelsSource

    @property
    def label(self) -> str:
        return f"{self.nugget_mode.value}/{self.assign_mode.value}/{self.qrels_source.value}"


#: The five evaluation strategies exercised in this framework. Configs may
#: extend this list with any coherent combination.
DEFAULT_CONDITIONS: tuple[EvalCondition, ...] = (
    EvalCondition(Provenance.AUTO_EDITED, Assigner.MANUAL, QrelsSource.MANUAL),
    EvalCondition(Provenance.MANUAL, Assigner.MANUAL, QrelsSource.MANUAL),
    EvalCondition(Provenance.AUTO, Assigner.AUTO, QrelsSource.AUTOMATIC),
    EvalCondition(Provenance.AUTO_EDITED, Assigner.AUTO, QrelsSource.MANUAL),
    EvalCondition(Provenance.MANUAL, Assigner.AUTO, QrelsSource.MANUAL),
)


def filter_relevant(
    qrels: Iterable[QrelRecord], topic_id: str, min_grade: int = 1
) -> list[str]:
    """Segment ids judged at least ``min_grade`` for ``topic_id``.

    Preserves the input record order; an unknown topic yields an empty list.
    """
    if min_grade < 0:
        raise ValueError(f"min_grade must be >= 0, got {min_grade}")
    return [
        r.segment_id for r in qrels if r.topic_id == topic_id and r.grade >= min_grade
    ]


@dataclass(frozen=True, slots=True)
class Violation:
    """One breached nugget-set invariant."""

    code: str
    message: str


def validate_nugget_set(nugget_set: NuggetSet) -> list[Violation]:
    """Check every nugget-set invariant; returns one violation per breach.

    Never raises: validation is a reporting operation. Draft sets (any
    unlabeled nugget) may hold up to 30 nuggets; finalized sets are capped at
    20 and, under auto provenance, must list vital nuggets before okay ones.
    Exact-duplicate texts are rejected in either state.
    """
    violations: list[Violation] = []
    nuggets = nugget_set.nuggets

    cap = DRAFT_CAP if nugget_set.is_draft else FINAL_CAP
    if len(nuggets) > cap:
        kind = "draft" if nugget_set.is_draft else "finalized"
        violations.append(
            Violation(
                "cap_exceeded",
                f"{kind} set has {len(nuggets)} nuggets, cap is {cap}",
            )
        )

    if not nugget_set.is_draft and nugget_set.provenance is Provenance.AUTO:
        seen_okay = False
        for i, nugget in enumerate(nuggets):
            if nugget.importance is Importance.OKAY:
                seen_okay = True
            elif nugget.importance is Importance.VITAL and seen_okay:
                violations.append(
                    Violation(
                        "order_violation",
                        f"vital nugget at position {i} follows an okay nugget",
                    )
                )
                break

    seen: set[str] = set()
    for nugget in nuggets:
        if nugget.text in seen:
            violations.append(
                Violation("duplicate_text", f"duplicate nugget text: {nugget.text!r}")
            )
        seen.add(nugget.text)

    return violations
