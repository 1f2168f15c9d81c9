"""Batch caps and retry settings shared by the LLM-driven stages."""

from __future__ import annotations

from dataclasses import dataclass

from nuggeteval.gateway.client import DecodeParams, RetryPolicy


@dataclass(frozen=True, slots=True)
class Caps:
    """Working sizes for nugget creation, selection, and assignment.

    Defaults mirror the evaluation protocol: segments and nuggets are fed to
    the LLM ten at a time, at most 30 nuggets survive creation, and 20 remain
    after importance-based selection. Relevance grade 1 is the floor for a
    segment to feed nugget creation.
    """

    segment_batch: int = 10
    nugget_batch: int = 10
    creation_cap: int = 30
    final_cap: int = 20
    min_grade: int = 1

    def __post_init__(self) -> None:
        for name in ("segment_batch", "nugget_batch", "creation_cap", "final_cap"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.min_grade < 0:
            raise ValueError("min_grade must be >= 0")


@dataclass(frozen=True, slots=True)
class StageConfig:
    """Everything an LLM-driven stage needs besides the client itself."""

    caps: Caps = Caps()
    retry: RetryPolicy = RetryPolicy()
    decode: DecodeParams = DecodeParams()
    workers: int = 1

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
