"""Uniform access to a chat-completion LLM: templates, transport, parsing."""

from nuggeteval.gateway.client import (
    CompletionResponse,
    DecodeParams,
    HttpChatClient,
    LLMClient,
    MockLLMClient,
    PromptRequest,
    RetryPolicy,
    TokenUsage,
    complete,
    complete_parsed,
    load_mock_script,
)
from nuggeteval.gateway.parsing import (
    parse_label_list,
    parse_string_list,
    serialize_string_list,
)
from nuggeteval.gateway.templates import TEMPLATE_IDS, render_template

__all__ = [
    "CompletionResponse",
    "DecodeParams",
    "HttpChatClient",
    "LLMClient",
    "MockLLMClient",
    "PromptRequest",
    "RetryPolicy",
    "TEMPLATE_IDS",
    "TokenUsage",
    "complete",
    "complete_parsed",
    "load_mock_script",
    "parse_label_list",
    "parse_string_list",
    "render_template",
    "serialize_string_list",
]
