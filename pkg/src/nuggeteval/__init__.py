"""Nugget-based recall evaluation for RAG answers.

The pipeline mirrors a two-step assessment protocol: first distill the facts
a good answer must contain (nugget creation, with vital/okay importance),
then judge per answer whether each fact is supported (nugget assignment).
Creation and assignment can each be automatic (LLM) or manual (assessor
service), giving a matrix of evaluation conditions whose agreement is
measured with tie-corrected rank correlations.
"""

from nuggeteval.model import (
    Answer,
    Assigner,
    AssignmentLabel,
    AssignmentRecord,
    DEFAULT_CONDITIONS,
    EvalCondition,
    Importance,
    Nugget,
    NuggetSet,
    Provenance,
    QrelRecord,
    QrelsSource,
    RunScores,
    Segment,
    Topic,
    TopicScores,
    filter_relevant,
    validate_nugget_set,
    word_count,
)

__version__ = "0.1.0"

__all__ = [
    "Answer",
    "Assigner",
    "AssignmentLabel",
    "AssignmentRecord",
    "DEFAULT_CONDITIONS",
    "EvalCondition",
    "Importance",
    "Nugget",
    "NuggetSet",
    "Provenance",
    "QrelRecord",
    "QrelsSource",
    "RunScores",
    "Segment",
    "Topic",
    "TopicScores",
    "filter_relevant",
    "validate_nugget_set",
    "word_count",
    "__version__",
]
