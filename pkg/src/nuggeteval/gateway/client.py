"""Chat-completion clients: live HTTP adapter and scripted mock.

``complete`` wraps any client with bounded exponential-backoff retries for
transient transport failures. ``complete_parsed`` adds the re-prompt loop for
malformed output: the same request is re-sent a bounded number of times, and
after that the caller gets the typed parse error instead of guessed labels.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Protocol, TypeVar

import httpx

from nuggeteval.errors import (
    AuthError,
    MockScriptError,
    ParseError,
    RequestTooLargeError,
    RetriesExhaustedError,
    TransportError,
)

log = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True, slots=True)
class DecodeParams:
    """Decoding settings; greedy with a fixed seed for reproducibility."""

    temperature: float = 0.0
    max_output_tokens: int = 2048
    seed: int | None = 42

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")


@dataclass(frozen=True, slots=True)
class PromptRequest:
    system_message: str
    user_message: str
    decode: DecodeParams = DecodeParams()

    def __post_init__(self) -> None:
        if not self.system_message or not self.user_message:
            raise ValueError("system and user messages must be non-empty")


@dataclass(frozen=True, slots=True)
class TokenUsage:
    input_tokens: int = 0
    output_tokens: int = 0


@dataclass(frozen=True, slots=True)
class CompletionResponse:
    text: str
    usage: TokenUsage = TokenUsage()
    attempt_count: int = 1


@dataclass(frozen=True, slots=True)
class RetryPolicy:
    """Bounds for the transport retry and malformed-output re-prompt loops."""

    max_attempts: int = 3
    base_delay: float = 0.5
    parse_reprompts: int = 3

    def __post_init__(self) -> None:
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.parse_reprompts < 0:
            raise ValueError("parse_reprompts must be >= 0")


class LLMClient(Protocol):
    """A single completion attempt; retry policy lives in ``complete``."""

    def complete_once(self, request: PromptRequest) -> CompletionResponse: ...


def complete(
    request: PromptRequest,
    client: LLMClient,
    retry: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> CompletionResponse:
    """First successful completion, retrying transient transport failures.

    Auth failures and over-budget requests are not retried; the latter tells
    the caller to shrink its batch. Raises RetriesExhaustedError once the
    attempt cap is hit.
    """
    last_error: Exception | None = None
    for attempt in range(1, retry.max_attempts + 1):
        try:
            response = client.complete_once(request)
            if attempt > 1:
                response = CompletionResponse(
                    text=response.text, usage=response.usage, attempt_count=attempt
                )
            return response
        except TransportError as exc:
            last_error = exc
            log.warning("transport failure on attempt %d: %s", attempt, exc)
            if attempt < retry.max_attempts:
                sleep(retry.base_delay * 2 ** (attempt - 1))
    assert last_error is not None
    raise RetriesExhaustedError(retry.max_attempts, last_error)


def complete_parsed(
    request: PromptRequest,
    client: LLMClient,
    parser: Callable[[str], T],
    retry: RetryPolicy = RetryPolicy(),
    sleep: Callable[[float], None] = time.sleep,
) -> T:
    """Complete and parse, re-prompting the identical request on bad output."""
    last_parse_error: ParseError | None = None
    for _ in range(1 + retry.parse_reprompts):
        response = complete(request, client, retry, sleep)
        try:
            return parser(response.text)
        except ParseError as exc:
            last_parse_error = exc
            log.warning("malformed response, re-prompting: %s", exc)
    assert last_parse_error is not None
    raise last_parse_error


# ---------------------------------------------------------------------------
# Scripted mock
# ---------------------------------------------------------------------------


@dataclass(slots=True)
class ScriptEntry:
    """One playback step.

    ``match`` guards against desynchronized playback: a string must occur in
    the user message, an int must equal the 0-based call index. ``repeat``
    serves the entry that many times before advancing; None repeats forever.
    ``error`` simulates a failure instead of returning text.
    """

    response: str = ""
    match: str | int | None = None
    repeat: int | None = 1
    error: str | None = None


_ERROR_FACTORIES: dict[str, Callable[[], Exception]] = {
    "transport": lambda: TransportError("scripted transport failure"),
    "auth": lambda: AuthError("scripted auth failure"),
    "too_large": lambda: RequestTooLargeError("scripted oversized request"),
}


class MockLLMClient:
    """Deterministic playback of a scripted response sequence.

    Thread-safe; keeps a log of every request for call-count assertions.
    """

    def __init__(self, entries: list[ScriptEntry]):
        self._entries = list(entries)
        self._position = 0
        self._served = 0
        self._lock = threading.Lock()
        self.calls: list[PromptRequest] = []

    @property
    def call_count(self) -> int:
        return len(self.calls)

    def complete_once(self, request: PromptRequest) -> CompletionResponse:
        with self._lock:
            index = len(self.calls)
            self.calls.append(request)
            if self._position >= len(self._entries):
                raise MockScriptError(f"script exhausted at call {index}")
            entry = self._entries[self._position]
            self._served += 1
            if entry.repeat is not None and self._served >= entry.repeat:
                self._position += 1
                self._served = 0
        if isinstance(entry.match, str) and entry.match not in request.user_message:
            raise MockScriptError(
                f"call {index}: expected {entry.match!r} in user message"
            )
        if isinstance(entry.match, int) and entry.match != index:
            raise MockScriptError(f"call {index}: script entry expects index {entry.match}")
        if entry.error is not None:
            factory = _ERROR_FACTORIES.get(entry.error)
            if factory is None:
                raise MockScriptError(f"unknown scripted error {entry.error!r}")
            raise factory()
        return CompletionResponse(text=entry.response)


def load_mock_script(path: str | Path) -> MockLLMClient:
    """Build a mock client from a JSON script file.

    The file holds an ordered list of objects with keys ``response``,
    ``match``, ``repeat`` (int or "forever"), and ``error``.
    """
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(raw, list):
        raise MockScriptError(f"{path}: script must be a JSON list")
    entries = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise MockScriptError(f"{path}: entry {i} must be an object")
        repeat = item.get("repeat", 1)
        if repeat == "forever":
            repeat = None
        entries.append(
            ScriptEntry(
                response=item.get("response", ""),
                match=item.get("match"),
                repeat=repeat,
                error=item.get("error"),
            )
        )
    return MockLLMClient(entries)


# ---------------------------------------------------------------------------
# Live HTTP adapter (OpenAI-style chat schema)
# ---------------------------------------------------------------------------


class HttpChatClient:
    """Adapter for chat endpoints speaking the common ``/chat/completions``
    schema. A semaphore caps in-flight requests across threads."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str | None = None,
        timeout: float = 60.0,
        max_in_flight: int = 4,
        transport: httpx.BaseTransport | None = None,
    ):
        self.model = model
        self._semaphore = threading.BoundedSemaphore(max_in_flight)
        headers = {}
        if api_key:
            headers["Authorization"] = f"Bearer {api_key}"
        self._http = httpx.Client(
            base_url=base_url, timeout=timeout, headers=headers, transport=transport
        )

    def complete_once(self, request: PromptRequest) -> CompletionResponse:
        payload: dict = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": request.system_message},
                {"role": "user", "content": request.user_message},
            ],
            "temperature": request.decode.temperature,
            "max_tokens": request.decode.max_output_tokens,
        }
        if request.decode.seed is not None:
            payload["seed"] = request.decode.seed
        try:
            with self._semaphore:
                response = self._http.post("/chat/completions", json=payload)
        except httpx.HTTPError as exc:
            raise TransportError(f"transport failure: {exc}") from exc
        return self._interpret(response)

    @staticmethod
    def _interpret(response: httpx.Response) -> CompletionResponse:
        if response.status_code in (401, 403):
            raise AuthError(f"endpoint rejected credentials ({response.status_code})")
        if response.status_code == 413 or _is_context_overflow(response):
            raise RequestTooLargeError("prompt exceeds the endpoint's context budget")
        if response.status_code == 429 or response.status_code >= 500:
            raise TransportError(f"endpoint returned {response.status_code}")
        if response.status_code != 200:
            raise TransportError(
                f"unexpected status {response.status_code}: {response.text[:200]}"
            )
        body = response.json()
        usage = body.get("usage", {})
        return CompletionResponse(
            text=body["choices"][0]["message"]["content"],
            usage=TokenUsage(
                input_tokens=usage.get("prompt_tokens", 0),
                output_tokens=usage.get("completion_tokens", 0),
            ),
        )

    def close(self) -> None:
        self._http.close()


def _is_context_overflow(response: httpx.Response) -> bool:
    if response.status_code != 400:
        return False
    try:
        body = response.json()
    except ValueError:
        return False
    code = str(body.get("error", {}).get("code", ""))
    message = str(body.get("error", {}).get("message", ""))
    return "context_length" in code or "context length" in message.lower()
