"""Parsing of the bracketed string lists the LLM is instructed to emit.

The model is told to answer with a list like ``["a", "b"]``, but real output
often wraps it in prose. ``parse_string_list`` scans for the first well-formed
list of double-quoted strings and ignores everything around it.
"""

from __future__ import annotations

import re
from typing import Sequence

from nuggeteval.errors import (
    IllegalLabelError,
    LengthMismatchError,
    NoListFoundError,
    UnterminatedStringError,
)

_LABEL_SEPARATORS = re.compile(r"[\s\-]+")


def serialize_string_list(items: Sequence[str]) -> str:
    """Render ``items`` in the same bracketed form the LLM is asked for.

    Escapes backslashes and double quotes; the inverse of
    :func:`parse_string_list` for any string content.
    """
    quoted = []
    for item in items:
        escaped = item.replace("\\", "\\\\").replace('"', '\\"')
        quoted.append(f'"{escaped}"')
    return "[" + ", ".join(quoted) + "]"


class _CandidateFailed(Exception):
    """This '[' does not start a well-formed string list; try the next one."""


def _scan_candidate(text: str, start: int) -> tuple[list[str], int]:
    """Try to parse a string list beginning at ``text[start] == '['``.

    Returns (items, end index past the closing bracket). Raises
    _CandidateFailed on structural mismatch and UnterminatedStringError when
    the input ends inside a quoted string.
    """
    i = start + 1
    n = len(text)
    items: list[str] = []

    def skip_ws(j: int) -> int:
        while j < n and text[j].isspace():
            j += 1
        return j

    i = skip_ws(i)
    if i < n and text[i] == "]":
        return items, i + 1

    while True:
        if i >= n or text[i] != '"':
            raise _CandidateFailed
        i += 1
        chars: list[str] = []
        while True:
            if i >= n:
                raise UnterminatedStringError(
                    f"string opened at offset {start} never closed"
                )
            ch = text[i]
            if ch == "\\":
                if i + 1 >= n:
                    raise UnterminatedStringError(
                        f"string opened at offset {start} never closed"
                    )
                nxt = text[i + 1]
                if nxt in ('"', "\\"):
                    chars.append(nxt)
                    i += 2
                else:
                    # Unknown escape: keep the backslash literally.
                    chars.append(ch)
                    i += 1
            elif ch == '"':
                i += 1
                break
            else:
                chars.append(ch)
                i += 1
        items.append("".join(chars))
        i = skip_ws(i)
        if i >= n:
            raise _CandidateFailed
        if text[i] == ",":
            i = skip_ws(i + 1)
            continue
        if text[i] == "]":
            return items, i + 1
        raise _CandidateFailed


def parse_string_list(text: str) -> list[str]:
    """Extract the first well-formed ``["a", "b", ...]`` list from ``text``.

    Surrounding prose is ignored; order is preserved; ``\\"`` and ``\\\\``
    are unescaped. ``[]`` parses to an empty list. Raises NoListFoundError
    when no candidate parses, or UnterminatedStringError when the only
    failure mode was an unclosed string.
    """
    unterminated: UnterminatedStringError | None = None
    start = text.find("[")
    while start != -1:
        try:
            items, _ = _scan_candidate(text, start)
            return items
        except _CandidateFailed:
            pass
        except UnterminatedStringError as exc:
            unterminated = unterminated or exc
        start = text.find("[", start + 1)
    if unterminated is not None:
        raise unterminated
    raise NoListFoundError(f"no bracketed string list in: {text[:200]!r}")


def normalize_label(raw: str) -> str:
    """Canonical label form: trimmed, lowercased, separators collapsed to _."""
    return _LABEL_SEPARATORS.sub("_", raw.strip().lower())


def parse_label_list(text: str, expected_len: int, allowed: set[str]) -> list[str]:
    """Parse a label list and enforce the count and vocabulary contract.

    Labels are normalized (case, whitespace, hyphens) before checking, so
    ``"Partial Support"`` maps to ``partial_support``. Raises
    LengthMismatchError or IllegalLabelError; never returns a list whose
    length differs from ``expected_len``.
    """
    if expected_len < 1:
        raise ValueError(f"expected_len must be >= 1, got {expected_len}")
    if not allowed:
        raise ValueError("allowed label set must be non-empty")
    items = parse_string_list(text)
    labels = [normalize_label(item) for item in items]
    if len(labels) != expected_len:
        raise LengthMismatchError(expected_len, len(labels))
    allowed_frozen = frozenset(allowed)
    for label in labels:
        if label not in allowed_frozen:
            raise IllegalLabelError(label, allowed_frozen)
    return labels
