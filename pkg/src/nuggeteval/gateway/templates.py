"""Prompt template rendering.

Templates live as plain text assets next to this module; substitution is
purely textual, so rendering the same bindings twice yields identical bytes.
Placeholders look like ``{name}``; replacement values are inserted verbatim
and never re-scanned for placeholders.
"""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

from nuggeteval.errors import MissingPlaceholderError, UnknownTemplateError
from nuggeteval.gateway.client import DecodeParams, PromptRequest

TEMPLATE_IDS = ("nuggetize", "importance", "assign")

_PLACEHOLDER = re.compile(r"\{([a-z_]+)\}")


@lru_cache(maxsize=None)
def _load_asset(name: str) -> str:
    path = resources.files("nuggeteval.gateway").joinpath("assets", name)
    return path.read_text(encoding="utf-8").rstrip("\n")


def template_text(template_id: str) -> tuple[str, str]:
    """The raw (system, user) template texts, placeholders unsubstituted."""
    if template_id not in TEMPLATE_IDS:
        raise UnknownTemplateError(
            f"unknown template {template_id!r}; known: {TEMPLATE_IDS}"
        )
    return (
        _load_asset(f"{template_id}.system.txt"),
        _load_asset(f"{template_id}.user.txt"),
    )


def _substitute(text: str, bindings: dict[str, str], template_id: str) -> str:
    missing = sorted(
        {name for name in _PLACEHOLDER.findall(text) if name not in bindings}
    )
    if missing:
        raise MissingPlaceholderError(missing, template_id)
    return _PLACEHOLDER.sub(lambda m: bindings[m.group(1)], text)


def render_template(
    template_id: str,
    bindings: dict[str, str],
    decode: DecodeParams | None = None,
) -> PromptRequest:
    """Fill a stored template's placeholders and wrap it as a request.

    Whitespace is preserved exactly; every placeholder in the template must
    be present in ``bindings`` (extras are ignored).
    """
    system_tpl, user_tpl = template_text(template_id)
    return PromptRequest(
        system_message=_substitute(system_tpl, bindings, template_id),
        user_message=_substitute(user_tpl, bindings, template_id),
        decode=decode if decode is not None else DecodeParams(),
    )
