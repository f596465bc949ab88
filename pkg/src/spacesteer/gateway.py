"""LLM gateway: one entry point for chat completions with retry and backoff.

The gateway owns policy (attempt counting, exponential backoff with jitter,
a concurrency cap); a provider owns transport. Two providers ship:

* ``OpenAICompatProvider`` speaks the plain chat-completions POST protocol
  against whatever LLM_BASE_URL points at.
* ``MockProvider`` is deterministic and offline. It can replay a response
  table keyed by request digest, play back a script (values or exceptions),
  or — by default — simulate the whole pipeline: it recognizes grading
  prompts by their bulleted score options, picks an allowed value per
  question by hashing the request digest, and answers everything else with
  stable text derived from the digest. That keeps end-to-end runs
  deterministic without a single canned fixture.

Requests are never mutated on retry: the same message bytes go out on every
attempt.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import re
import threading
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Protocol, Sequence

import httpx

from .canonical import canonical_json, digest_of
from .compiler import Message
from .errors import (
    AuthError,
    GatewayError,
    InvalidRequest,
    ProviderError,
    ProviderTimeout,
    RateLimited,
)

DEFAULT_MODEL = "gpt-4o"
DEFAULT_BASE_URL = "https://api.openai.com/v1"
DEFAULT_MAX_ATTEMPTS = 3
DEFAULT_CONCURRENCY = 4

TRANSIENT_ERRORS = (RateLimited, ProviderError, ProviderTimeout)


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[Message, ...]
    temperature: float
    model: str = DEFAULT_MODEL
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def __post_init__(self) -> None:
        if not self.messages:
            raise InvalidRequest("request has no messages")
        if not all(m.content for m in self.messages):
            raise InvalidRequest("request contains an empty message")
        if not (0.0 <= self.temperature <= 2.0):
            raise InvalidRequest(
                f"temperature {self.temperature} outside [0, 2]")
        if self.max_attempts < 1:
            raise InvalidRequest("max_attempts must be at least 1")

    def digest(self) -> str:
        return digest_of({
            "messages": [{"role": m.role, "content": m.content} for m in self.messages],
            "temperature": self.temperature,
            "model": self.model,
        })


@dataclass(frozen=True)
class CompletionResult:
    text: str
    attempts_used: int
    latency_s: float
    provider: str


class Provider(Protocol):
    name: str

    def send(self, request: CompletionRequest) -> str: ...


class OpenAICompatProvider:
    """Chat-completions POST against an OpenAI-compatible endpoint."""

    name = "openai-compatible"

    def __init__(self, api_key: str, base_url: str = DEFAULT_BASE_URL,
                 timeout_s: float = 60.0) -> None:
        self._api_key = api_key
        self._base_url = base_url.rstrip("/")
        self._client = httpx.Client(timeout=timeout_s)

    def send(self, request: CompletionRequest) -> str:
        payload = {
            "model": request.model,
            "temperature": request.temperature,
            "messages": [
                {"role": m.role, "content": m.content} for m in request.messages
            ],
        }
        headers = {"Authorization": f"Bearer {self._api_key}"}
        try:
            response = self._client.post(
                f"{self._base_url}/chat/completions", json=payload, headers=headers)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise ProviderError(str(exc)) from exc
        if response.status_code in (401, 403):
            raise AuthError(f"provider rejected credentials ({response.status_code})")
        if response.status_code == 429:
            raise RateLimited(response.text[:200])
        if response.status_code >= 500:
            raise ProviderError(f"{response.status_code}: {response.text[:200]}")
        if response.status_code != 200:
            raise GatewayError(f"{response.status_code}: {response.text[:200]}")
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise ProviderError(f"unexpected completion payload: {exc}") from exc


_OPTION_LINE = re.compile(r"^\* .+ - (-?\d+(?:\.\d+)?)\s*$")
_QUESTION_LINE = re.compile(r"^Q(\d+)\.\s")


def _stable_pick(seed: str, size: int) -> int:
    h = hashlib.sha256(seed.encode("utf-8")).hexdigest()
    return int(h[:8], 16) % size


def _parse_option_blocks(text: str) -> dict[str, list[float]]:
    """Question label -> allowed values, read from bulleted option lines."""
    blocks: dict[str, list[float]] = {}
    current: str | None = None
    for line in text.splitlines():
        q = _QUESTION_LINE.match(line)
        if q:
            current = f"Q{q.group(1)}"
            blocks[current] = []
            continue
        opt = _OPTION_LINE.match(line.strip())
        if opt and current is not None:
            blocks[current].append(float(opt.group(1)))
    return {k: v for k, v in blocks.items() if v}


class MockProvider:
    """Deterministic offline provider. See the module docstring for the
    three modes; exactly one is active per instance."""

    name = "mock"

    def __init__(self,
                 responses: Mapping[str, str] | None = None,
                 script: Sequence[str | Exception] | None = None) -> None:
        if responses is not None and script is not None:
            raise ValueError("pass a response table or a script, not both")
        self._responses = dict(responses) if responses is not None else None
        self._script = list(script) if script is not None else None
        self._lock = threading.Lock()
        self.call_count = 0

    def send(self, request: CompletionRequest) -> str:
        with self._lock:
            self.call_count += 1
            if self._script is not None:
                if not self._script:
                    raise ProviderError("mock script exhausted")
                item = self._script.pop(0)
                if isinstance(item, Exception):
                    raise item
                return item
        if self._responses is not None:
            digest = request.digest()
            try:
                return self._responses[digest]
            except KeyError:
                raise ProviderError(f"no scripted response for digest {digest[:12]}") from None
        return self._simulate(request)

    def _simulate(self, request: CompletionRequest) -> str:
        digest = request.digest()
        assistant = "\n".join(
            m.content for m in request.messages if m.role == "assistant")
        blocks = _parse_option_blocks(assistant)
        if blocks:
            grades = {
                label: options[_stable_pick(f"{digest}:{label}", len(options))]
                for label, options in blocks.items()
            }
            return json.dumps(grades, ensure_ascii=False)
        questions = [
            line for line in assistant.splitlines() if _QUESTION_LINE.match(line)]
        if questions:
            answers = [
                f"A{i}. Mock answer derived from {digest[:12]} for question {i}."
                for i in range(1, len(questions) + 1)
            ]
            return "\n".join(answers)
        return (
            f"Bottom Line Up Front: mock report for request {digest[:12]}. "
            f"The findings below are synthetic placeholders produced offline.\n\n"
            f"Outline Point 1 (Mock): nothing real was analyzed.\n\n"
            f"In conclusion, this text only exercises the pipeline."
        )


class EchoProvider:
    """Returns the canonical JSON of the request messages; lets tests assert
    that the gateway forwards requests byte-for-byte, attempt after attempt."""

    name = "echo"

    def __init__(self) -> None:
        self.call_count = 0

    def send(self, request: CompletionRequest) -> str:
        self.call_count += 1
        return canonical_json(
            [{"role": m.role, "content": m.content} for m in request.messages])


class Gateway:
    """Retry/backoff wrapper around a provider.

    Backoff starts at ``initial_backoff`` seconds and doubles per retry, with
    ±20% uniform jitter. AuthError is terminal; transient failures retry up
    to the request's max_attempts. ``sleep`` and ``rng`` are injectable so
    tests can observe the schedule without waiting for it.
    """

    def __init__(self,
                 provider: Provider,
                 max_concurrency: int = DEFAULT_CONCURRENCY,
                 initial_backoff: float = 1.0,
                 backoff_factor: float = 2.0,
                 jitter: float = 0.2,
                 sleep: Callable[[float], None] = time.sleep,
                 rng: random.Random | None = None) -> None:
        if max_concurrency < 1:
            raise ValueError("max_concurrency must be at least 1")
        self.provider = provider
        self._semaphore = threading.Semaphore(max_concurrency)
        self._initial_backoff = initial_backoff
        self._backoff_factor = backoff_factor
        self._jitter = jitter
        self._sleep = sleep
        self._rng = rng if rng is not None else random.Random()

    @property
    def provider_name(self) -> str:
        return self.provider.name

    def _backoff_delay(self, retry_index: int) -> float:
        base = self._initial_backoff * (self._backoff_factor ** retry_index)
        spread = self._rng.uniform(1.0 - self._jitter, 1.0 + self._jitter)
        return base * spread

    def complete(self, request: CompletionRequest) -> CompletionResult:
        started = time.monotonic()
        last_error: GatewayError | None = None
        with self._semaphore:
            for attempt in range(1, request.max_attempts + 1):
                try:
                    text = self.provider.send(request)
                except AuthError:
                    raise
                except TRANSIENT_ERRORS as exc:
                    last_error = exc
                    if attempt < request.max_attempts:
                        self._sleep(self._backoff_delay(attempt - 1))
                    continue
                return CompletionResult(
                    text=text,
                    attempts_used=attempt,
                    latency_s=time.monotonic() - started,
                    provider=self.provider.name,
                )
        assert last_error is not None
        raise last_error


def gateway_from_env(env: Mapping[str, str] | None = None) -> Gateway:
    """Live gateway when LLM_API_KEY is set, deterministic mock otherwise."""
    env = os.environ if env is None else env
    api_key = env.get("LLM_API_KEY")
    if api_key:
        provider: Provider = OpenAICompatProvider(
            api_key=api_key,
            base_url=env.get("LLM_BASE_URL", DEFAULT_BASE_URL),
        )
        return Gateway(provider)
    return Gateway(MockProvider())


def default_model(env: Mapping[str, str] | None = None) -> str:
    env = os.environ if env is None else env
    return env.get("LLM_MODEL", DEFAULT_MODEL)
