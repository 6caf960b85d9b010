"""Chat-completion gateway: OpenAI-compatible wire protocol, content-addressed
response cache, jittered exponential retry, bounded concurrency, and a
deterministic playback backend for tests and offline reruns.

Only ``model``, ``messages``, and ``top_p`` go on the wire; every other
sampling parameter is omitted so the server applies its own defaults.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Protocol

import httpx

from .prompting import ChatMessage, PromptTemplate, build_messages

logger = logging.getLogger(__name__)

API_KEY_ENV = "MIPW_API_KEY"
BASE_URL_ENV = "MIPW_BASE_URL"
COMPLETIONS_PATH = "/v1/chat/completions"

RETRYABLE_STATUSES = {408, 429} | set(range(500, 600))
NON_RETRYABLE_AUTH = {401, 403}


class GatewayError(Exception):
    kind = "gateway_error"


class AuthFailedError(GatewayError):
    kind = "auth_failed"


class RequestRejectedError(GatewayError):
    kind = "request_rejected"


class TimeoutError_(GatewayError):
    kind = "timeout"


class MalformedResponseError(GatewayError):
    kind = "malformed_response"


class RetriesExhaustedError(GatewayError):
    kind = "retries_exhausted"

    def __init__(self, message: str, attempts: int, last_status: int | None = None):
        super().__init__(message)
        self.attempts = attempts
        self.last_status = last_status


class UnscriptedRequestError(GatewayError):
    kind = "unscripted_request"

    def __init__(self, digest: str):
        super().__init__(f"no scripted response for request digest {digest}")
        self.digest = digest


@dataclass(frozen=True)
class ModelConfig:
    model_id: str
    top_p: float = 0.1
    max_attempts: int = 5
    backoff_base: float = 1.0  # seconds
    request_timeout: float = 120.0  # seconds
    max_in_flight: int = 4
    cache_dir: str | Path | None = None

    def __post_init__(self) -> None:
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")


@dataclass(frozen=True)
class CompletionRequest:
    messages: tuple[ChatMessage, ...]
    config: ModelConfig

    def __post_init__(self) -> None:
        if not self.messages:
            raise ValueError("messages must be non-empty")


@dataclass(frozen=True)
class CompletionResult:
    text: str
    model_id: str
    finish_reason: str
    from_cache: bool
    attempts: int


def build_payload(request: CompletionRequest) -> dict:
    return {
        "model": request.config.model_id,
        "messages": [{"role": m.role.value, "content": m.content} for m in request.messages],
        "top_p": request.config.top_p,
    }


def cache_key(request: CompletionRequest) -> str:
    """Digest over (model_id, top_p, messages); equal inputs, equal digests."""
    digest_input = json.dumps(
        {
            "model": request.config.model_id,
            "top_p": request.config.top_p,
            "messages": [[m.role.value, m.content] for m in request.messages],
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(digest_input.encode("utf-8")).hexdigest()


class Backend(Protocol):
    def send(self, request: CompletionRequest) -> tuple[int, dict]:
        """Return (http_status, response_body)."""


class HttpBackend:
    """POSTs to {base_url}/v1/chat/completions with a bearer credential."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 transport: httpx.BaseTransport | None = None):
        self.base_url = (base_url or os.environ.get(BASE_URL_ENV) or "https://api.openai.com").rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self._client = httpx.Client(transport=transport)

    def send(self, request: CompletionRequest) -> tuple[int, dict]:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = self._client.post(
                self.base_url + COMPLETIONS_PATH,
                json=build_payload(request),
                headers=headers,
                timeout=request.config.request_timeout,
            )
        except httpx.TimeoutException as exc:
            raise TimeoutError_(f"request timed out after {request.config.request_timeout}s") from exc
        try:
            body = response.json()
        except ValueError:
            body = {"raw": response.text}
        return response.status_code, body


class PlaybackBackend:
    """Deterministic test double: scripted response text keyed by request digest."""

    def __init__(self, fixtures: dict[str, str]):
        self.fixtures = dict(fixtures)

    @classmethod
    def from_file(cls, path: str | Path) -> "PlaybackBackend":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")))

    def send(self, request: CompletionRequest) -> tuple[int, dict]:
        digest = cache_key(request)
        if digest not in self.fixtures:
            raise UnscriptedRequestError(digest)
        return 200, {
            "choices": [
                {"message": {"content": self.fixtures[digest]}, "finish_reason": "stop"}
            ]
        }


def playback_backend(fixtures: dict[str, str]) -> PlaybackBackend:
    return PlaybackBackend(fixtures)


class ScriptedBackend:
    """Replays a fixed sequence of (status, body) replies; for retry tests."""

    def __init__(self, replies: list[tuple[int, dict]]):
        self.replies = list(replies)
        self.calls = 0

    def send(self, request: CompletionRequest) -> tuple[int, dict]:
        self.calls += 1
        if not self.replies:
            raise UnscriptedRequestError(cache_key(request))
        status, body = self.replies.pop(0)
        return status, body


def _cache_path(cache_dir: Path, digest: str) -> Path:
    return cache_dir / digest[:2] / f"{digest}.json"


class Gateway:
    """Shareable across threads; in-flight requests bounded by max_in_flight."""

    def __init__(
        self,
        config: ModelConfig,
        backend: Backend | None = None,
        *,
        sleep: Callable[[float], None] = time.sleep,
        rng: random.Random | None = None,
    ):
        self.config = config
        self.backend = backend if backend is not None else HttpBackend()
        self._sleep = sleep
        self._rng = rng or random.Random()
        self._admission = threading.Semaphore(config.max_in_flight)
        self._cache_lock = threading.Lock()

    # -- cache -------------------------------------------------------------

    def _cache_read(self, digest: str) -> CompletionResult | None:
        if self.config.cache_dir is None:
            return None
        path = _cache_path(Path(self.config.cache_dir), digest)
        if not path.exists():
            return None
        data = json.loads(path.read_text(encoding="utf-8"))
        return CompletionResult(
            text=data["response"]["text"],
            model_id=data["request"]["model"],
            finish_reason=data["response"]["finish_reason"],
            from_cache=True,
            attempts=int(data["response"].get("attempts", 1)),
        )

    def _cache_write(self, digest: str, request: CompletionRequest, result: CompletionResult) -> None:
        if self.config.cache_dir is None:
            return
        path = _cache_path(Path(self.config.cache_dir), digest)
        path.parent.mkdir(parents=True, exist_ok=True)
        if path.exists():  # write-once per key
            return
        record = {
            "digest": digest,
            "request": build_payload(request),
            "response": {
                "text": result.text,
                "finish_reason": result.finish_reason,
                "attempts": result.attempts,
            },
        }
        tmp = path.with_suffix(f".tmp.{os.getpid()}.{threading.get_ident()}")
        tmp.write_text(json.dumps(record, ensure_ascii=False, sort_keys=True, indent=2), encoding="utf-8")
        os.replace(tmp, path)

    # -- completion --------------------------------------------------------

    def _backoff_delay(self, attempt: int) -> float:
        # factor-2 exponential with ±20% jitter; monotone since 2 > 1.2/0.8
        base = self.config.backoff_base * (2 ** (attempt - 1))
        return base * (0.8 + 0.4 * self._rng.random())

    def complete(self, request: CompletionRequest) -> CompletionResult:
        digest = cache_key(request)
        cached = self._cache_read(digest)
        if cached is not None:
            return cached
        last_status: int | None = None
        timed_out = False
        for attempt in range(1, request.config.max_attempts + 1):
            try:
                with self._admission:
                    status, body = self.backend.send(request)
            except TimeoutError_:
                timed_out = True
                last_status = None
                if attempt == request.config.max_attempts:
                    break
                self._sleep(self._backoff_delay(attempt))
                continue
            if status in NON_RETRYABLE_AUTH:
                raise AuthFailedError(f"authentication failed (HTTP {status})")
            if status == 400:
                raise RequestRejectedError(f"request rejected (HTTP 400): {_brief(body)}")
            if status in RETRYABLE_STATUSES:
                last_status = status
                if attempt == request.config.max_attempts:
                    break
                self._sleep(self._backoff_delay(attempt))
                continue
            if status != 200:
                raise GatewayError(f"unexpected HTTP status {status}: {_brief(body)}")
            try:
                choice = body["choices"][0]
                text = choice["message"]["content"]
                finish_reason = choice.get("finish_reason", "")
            except (KeyError, IndexError, TypeError) as exc:
                raise MalformedResponseError(f"response body lacks a completion: {_brief(body)}") from exc
            if not isinstance(text, str):
                raise MalformedResponseError("completion content is not text")
            result = CompletionResult(
                text=text,
                model_id=request.config.model_id,
                finish_reason=finish_reason or "",
                from_cache=False,
                attempts=attempt,
            )
            with self._cache_lock:
                self._cache_write(digest, request, result)
            return result
        if timed_out:
            raise TimeoutError_(
                f"request timed out on all {request.config.max_attempts} attempt(s)"
            )
        raise RetriesExhaustedError(
            f"gave up after {request.config.max_attempts} attempt(s), last HTTP status {last_status}",
            attempts=request.config.max_attempts,
            last_status=last_status,
        )

    # -- batching ----------------------------------------------------------

    def run_batch(
        self,
        records,
        template: PromptTemplate,
        progress: Callable[[dict], None] | None = None,
    ) -> dict[str, CompletionResult | GatewayError]:
        """One result or error per record id; failures never abort the batch."""
        if not records:
            raise ValueError("records must be non-empty")
        results: dict[str, CompletionResult | GatewayError] = {}
        lock = threading.Lock()
        total = len(records)

        def work(record) -> None:
            instance = build_messages(template, record.sentence, sentence_id=record.id)
            request = CompletionRequest(messages=instance.messages, config=self.config)
            outcome: CompletionResult | GatewayError
            try:
                outcome = self.complete(request)
            except GatewayError as exc:
                logger.warning("request for %s failed: %s", record.id, exc)
                outcome = exc
            with lock:
                results[record.id] = outcome
                done = len(results)
            if progress is not None:
                progress(
                    {
                        "id": record.id,
                        "done": done,
                        "total": total,
                        "ok": isinstance(outcome, CompletionResult),
                        "error": getattr(outcome, "kind", None)
                        if isinstance(outcome, GatewayError)
                        else None,
                    }
                )

        with ThreadPoolExecutor(max_workers=self.config.max_in_flight) as pool:
            list(pool.map(work, records))
        return results


def _brief(body: dict) -> str:
    text = json.dumps(body, ensure_ascii=False, sort_keys=True, default=str)
    return text if len(text) <= 200 else text[:200] + "..."
