"""Typed errors shared across the package.

Every failure mode a caller is expected to branch on gets its own class;
anything else surfaces as a plain ValueError at the offending call site.
"""

from __future__ import annotations


class NuggetEvalError(Exception):
    """Base class for all package errors."""


# ---------------------------------------------------------------------------
# LLM gateway
# ---------------------------------------------------------------------------


class GatewayError(NuggetEvalError):
    """Base class for chat-endpoint failures."""


class TransportError(GatewayError):
    """Transient transport failure (timeouts, 429, 5xx). Retried."""


class AuthError(GatewayError):
    """Credentials rejected by the endpoint. Not retried."""


class RequestTooLargeError(GatewayError):
    """Prompt exceeds the endpoint's context budget.

    Not retried; signals the caller to shrink its batch.
    """


class RetriesExhaustedError(GatewayError):
    """All transport retries failed."""

    def __init__(self, attempts: int, last_error: Exception):
        super().__init__(f"request failed after {attempts} attempts: {last_error!r}")
        self.attempts = attempts
        self.last_error = last_error


class MockScriptError(GatewayError):
    """Scripted mock exhausted or a match rule failed."""


# ---------------------------------------------------------------------------
# Response parsing
# ---------------------------------------------------------------------------


class ParseError(NuggetEvalError):
    """Base class for malformed LLM output. Triggers a re-prompt."""


class NoListFoundError(ParseError):
    """No well-formed bracketed string list anywhere in the response."""


class UnterminatedStringError(ParseError):
    """A quoted string opened but never closed."""


class LengthMismatchError(ParseError):
    """Label list came back with the wrong number of entries."""

    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} labels, got {got}")
        self.expected = expected
        self.got = got


class IllegalLabelError(ParseError):
    """Label outside the allowed set."""

    def __init__(self, label: str, allowed: frozenset[str]):
        super().__init__(f"illegal label {label!r}; allowed: {sorted(allowed)}")
        self.label = label
        self.allowed = allowed


# ---------------------------------------------------------------------------
# Prompt templates
# ---------------------------------------------------------------------------


class TemplateError(NuggetEvalError):
    """Base class for template rendering failures."""


class UnknownTemplateError(TemplateError):
    """Template id is not one of the stored templates."""


class MissingPlaceholderError(TemplateError):
    """Template placeholder absent from the bindings."""

    def __init__(self, names: list[str], template_id: str):
        super().__init__(f"template {template_id!r} missing bindings: {names}")
        self.names = names
        self.template_id = template_id


# ---------------------------------------------------------------------------
# Ingestion, alignment, pipeline
# ---------------------------------------------------------------------------


class IngestError(NuggetEvalError):
    """Malformed or inconsistent input file."""

    def __init__(self, message: str, path: str | None = None, line_no: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:" if line_no is None else f"{path}:{line_no}: "
        super().__init__(f"{where}{message}")
        self.path = path
        self.line_no = line_no


class AlignmentError(NuggetEvalError):
    """Nugget list and label list disagree on topic or length."""


class EmptyInputError(NuggetEvalError):
    """An aggregate was requested over an empty collection."""


class CorrelationError(NuggetEvalError):
    """Too little overlap between two score matrices to correlate."""


class ConfigError(NuggetEvalError):
    """Pipeline configuration is invalid or inconsistent with its inputs."""
