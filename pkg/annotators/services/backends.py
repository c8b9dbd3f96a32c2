"""
Annotator backends. Each backend turns a PromptText into a RawResponse;
parsing and lexicon matching happen in ``annotation_service``.
"""

import copy
import json
import logging
import threading
import time
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Mapping, Optional, Sequence, Union

import requests
from django.conf import settings
from google.genai import errors, types

from annotators.domain import RawResponse
from annotators.services.ai_client import get_ai_client, get_model
from keyroom.domain import Transition, canonical_flags
from promptkit.domain import PromptText

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = frozenset({408, 425, 429, 500, 502, 503, 504})


class AnnotatorBackendError(RuntimeError):
    """Raised when a backend cannot produce a response, after retries."""

    def __init__(self, message: str, prompt_id: Optional[str] = None):
        super().__init__(f"{message} (prompt {prompt_id})" if prompt_id else message)
        self.prompt_id = prompt_id


class RecordedLookupError(KeyError):
    """Raised when a recorded or scripted backend has no entry for a prompt."""


class AnnotatorBackend(ABC):
    """
    ``backend_id`` names the kind of backend; ``name`` is the annotator shown in
    reports and stored on every response.
    """

    backend_id = "base"

    def __init__(self, name: Optional[str] = None):
        self.name = name or self.backend_id

    @property
    def model_name(self) -> str:
        return ""

    @abstractmethod
    def complete(self, prompt: PromptText, transition: Transition) -> RawResponse:
        ...

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class OracleBackend(AnnotatorBackend):
    """Answers with the ground truth of the transition, as a fenced python dict."""

    backend_id = "oracle"

    def __init__(self, name: str = "Oracle"):
        super().__init__(name)

    def complete(self, prompt: PromptText, transition: Transition) -> RawResponse:
        flags = canonical_flags(transition.event)
        return RawResponse(
            text=f"```python\n{flags!r}\n```",
            latency_ms=0.0,
            backend=self.name,
            prompt_id=prompt.prompt_id,
        )


class MockBackend(AnnotatorBackend):
    """
    Replays fixed response texts. A sequence script is indexed by the transition
    id so the choice does not depend on call order; a mapping script is looked
    up by transition id, then prompt id, then ``"*"``.
    """

    backend_id = "mock"

    def __init__(self, script: Union[Sequence[str], Mapping[str, str]], name: str = "Mock"):
        super().__init__(name)
        if not script:
            raise ValueError("MockBackend needs a non-empty script")
        self.script = script

    def complete(self, prompt: PromptText, transition: Transition) -> RawResponse:
        return RawResponse(
            text=self._pick(prompt, transition),
            latency_ms=0.0,
            backend=self.name,
            prompt_id=prompt.prompt_id,
        )

    def _pick(self, prompt: PromptText, transition: Transition) -> str:
        if isinstance(self.script, Mapping):
            for key in (transition.id, prompt.prompt_id, "*"):
                if key in self.script:
                    return self.script[key]
            raise RecordedLookupError(f"no scripted response for transition {transition.id}")
        return self.script[int(transition.id[:8], 16) % len(self.script)]


class RecordedFileBackend(AnnotatorBackend):
    """
    Serves responses from a verdict JSONL file. Lookup order: prompt id, then
    (transition id, config name), then transition id alone.
    """

    backend_id = "recorded"

    def __init__(self, path, name: Optional[str] = None):
        super().__init__(name or Path(path).stem)
        self.path = Path(path)
        self._lock = threading.Lock()
        self._index = None
        self._name_given = name is not None

    def _load(self):
        with self._lock:
            if self._index is not None:
                return self._index
            if not self.path.exists():
                raise AnnotatorBackendError(f"recorded responses file not found: {self.path}")
            index = {}
            with self.path.open(encoding="utf-8") as handle:
                for lineno, line in enumerate(handle, start=1):
                    if not line.strip():
                        continue
                    try:
                        record = json.loads(line)
                    except ValueError as e:
                        raise AnnotatorBackendError(f"{self.path}:{lineno}: invalid JSON ({e})") from e
                    if "prompt_id" in record:
                        index.setdefault(record["prompt_id"], record)
                    if "transition_id" in record:
                        index.setdefault((record["transition_id"], record.get("config_name")), record)
                        index.setdefault(record["transition_id"], record)
            logger.info(f"[RecordedFile] Indexed {self.path.name}")
            self._index = index
            return index

    def complete(self, prompt: PromptText, transition: Transition) -> RawResponse:
        index = self._load()
        for key in (prompt.prompt_id, (transition.id, prompt.config_name), transition.id):
            record = index.get(key)
            if record is not None:
                break
        else:
            raise RecordedLookupError(
                f"{self.path.name}: no response for prompt {prompt.prompt_id} / transition {transition.id}"
            )
        backend = self.name if self._name_given else record.get("backend") or self.name
        return RawResponse(
            text=record.get("raw_text", ""),
            latency_ms=float(record.get("latency_ms") or 0.0),
            backend=backend,
            prompt_id=prompt.prompt_id,
        )


class _Retryable(Exception):
    pass


class _RetryingBackend(AnnotatorBackend):
    """Shared retry loop with exponential backoff for network backends."""

    def __init__(self, name, max_retries: int, backoff: float):
        super().__init__(name)
        self.max_retries = max_retries
        self.backoff = backoff

    def _with_retries(self, call, prompt_id: str) -> str:
        last_error = None
        for attempt in range(self.max_retries + 1):
            try:
                return call()
            except _Retryable as e:
                last_error = e
                if attempt == self.max_retries:
                    break
                delay = self.backoff * (2 ** attempt)
                logger.warning(
                    f"[{type(self).__name__}] Attempt {attempt + 1} failed for {prompt_id}: {e}. "
                    f"Retrying in {delay:.1f}s"
                )
                time.sleep(delay)
        logger.error(f"[{type(self).__name__}] Giving up on {prompt_id}: {last_error}")
        raise AnnotatorBackendError(
            f"{self.name}: request failed after {self.max_retries + 1} attempts: {last_error}",
            prompt_id=prompt_id,
        ) from last_error


class HttpLlmBackend(_RetryingBackend):
    """
    Chat-completion style endpoint. Every request decodes greedily
    (temperature 0). ``request_template`` adapts to other servers:

        {"body": {...with "{prompt}", "{model}", "{max_tokens}" placeholders...},
         "response_path": ["choices", 0, "message", "content"],
         "headers": {...}, "temperature_field": "temperature"}
    """

    backend_id = "http"

    def __init__(
        self,
        endpoint: str,
        model: str,
        *,
        name: Optional[str] = None,
        api_key: Optional[str] = None,
        timeout: Optional[float] = None,
        max_retries: Optional[int] = None,
        backoff: Optional[float] = None,
        max_tokens: Optional[int] = None,
        request_template: Optional[dict] = None,
    ):
        super().__init__(
            name or model,
            max_retries if max_retries is not None else getattr(settings, "CALM_MAX_RETRIES", 3),
            backoff if backoff is not None else getattr(settings, "CALM_RETRY_BACKOFF", 1.0),
        )
        if not endpoint:
            raise ValueError("HttpLlmBackend needs an endpoint URL")
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.timeout = timeout if timeout is not None else getattr(settings, "CALM_REQUEST_TIMEOUT", 120)
        self.max_tokens = max_tokens if max_tokens is not None else getattr(settings, "CALM_MAX_TOKENS", 1024)
        self.request_template = request_template

    @property
    def model_name(self) -> str:
        return self.model

    def build_payload(self, prompt_text: str) -> dict:
        if self.request_template is None:
            return {
                "model": self.model,
                "messages": [{"role": "user", "content": prompt_text}],
                "temperature": 0,
                "max_tokens": self.max_tokens,
            }
        values = {"{prompt}": prompt_text, "{model}": self.model, "{max_tokens}": self.max_tokens}
        body = _fill(copy.deepcopy(self.request_template.get("body", {})), values)
        field = self.request_template.get("temperature_field", "temperature")
        if field:
            _set_path(body, field.split("."), 0)
        return body

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.request_template:
            headers.update(self.request_template.get("headers", {}))
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        return headers

    def extract_text(self, data) -> str:
        path = (self.request_template or {}).get("response_path")
        if path is None:
            choice = data["choices"][0]
            message = choice.get("message") or {}
            return message.get("content") if "content" in message else choice.get("text", "")
        if isinstance(path, str):
            path = [int(part) if part.isdigit() else part for part in path.split(".")]
        for key in path:
            data = data[key]
        return data

    def complete(self, prompt: PromptText, transition: Transition) -> RawResponse:
        payload = self.build_payload(prompt.text)
        headers = self._headers()

        def call():
            try:
                response = requests.post(self.endpoint, json=payload, headers=headers, timeout=self.timeout)
            except requests.RequestException as e:
                raise _Retryable(str(e)) from e
            if response.status_code in RETRYABLE_STATUS:
                raise _Retryable(f"HTTP {response.status_code}")
            if response.status_code >= 400:
                raise AnnotatorBackendError(
                    f"{self.name}: HTTP {response.status_code}: {response.text[:200]}",
                    prompt_id=prompt.prompt_id,
                )
            try:
                return self.extract_text(response.json()) or ""
            except (ValueError, KeyError, IndexError, TypeError) as e:
                raise AnnotatorBackendError(
                    f"{self.name}: unexpected response shape: {e}", prompt_id=prompt.prompt_id
                ) from e

        started = time.perf_counter()
        text = self._with_retries(call, prompt.prompt_id)
        latency_ms = (time.perf_counter() - started) * 1000
        logger.debug(f"[HttpLlm] {self.model} answered {prompt.prompt_id} in {latency_ms:.0f} ms")
        return RawResponse(text=text, latency_ms=latency_ms, backend=self.name, prompt_id=prompt.prompt_id)


def _fill(node, values: dict):
    if isinstance(node, dict):
        return {key: _fill(value, values) for key, value in node.items()}
    if isinstance(node, list):
        return [_fill(value, values) for value in node]
    if isinstance(node, str):
        if node in values:
            return values[node]
        for placeholder, value in values.items():
            node = node.replace(placeholder, str(value))
    return node


def _set_path(body: dict, path: list, value):
    for key in path[:-1]:
        body = body.setdefault(key, {})
    body[path[-1]] = value


class GeminiBackend(_RetryingBackend):
    """
    Gemini through google-genai, greedy decoding. API errors with a transient
    status and dropped connections are retried; anything else fails at once.
    """

    backend_id = "gemini"

    def __init__(
        self,
        model: Optional[str] = None,
        *,
        name: Optional[str] = None,
        max_retries: Optional[int] = None,
        backoff: Optional[float] = None,
        max_tokens: Optional[int] = None,
    ):
        self.model = model or get_model()
        super().__init__(
            name or self.model,
            max_retries if max_retries is not None else getattr(settings, "CALM_MAX_RETRIES", 3),
            backoff if backoff is not None else getattr(settings, "CALM_RETRY_BACKOFF", 1.0),
        )
        self.max_tokens = max_tokens if max_tokens is not None else getattr(settings, "CALM_MAX_TOKENS", 1024)
        self._client = None

    @property
    def model_name(self) -> str:
        return self.model

    @property
    def client(self):
        if self._client is None:
            try:
                self._client = get_ai_client()
            except ValueError as e:
                raise AnnotatorBackendError(f"{self.name}: {e}") from e
        return self._client

    def complete(self, prompt: PromptText, transition: Transition) -> RawResponse:
        client = self.client
        config = types.GenerateContentConfig(temperature=0, max_output_tokens=self.max_tokens)

        def call():
            try:
                response = client.models.generate_content(model=self.model, contents=prompt.text, config=config)
            except errors.APIError as e:
                if e.code in RETRYABLE_STATUS:
                    raise _Retryable(str(e)) from e
                raise AnnotatorBackendError(f"{self.name}: API error {e.code}: {e}", prompt_id=prompt.prompt_id) from e
            except (ConnectionError, TimeoutError) as e:
                raise _Retryable(str(e)) from e
            except Exception as e:
                raise AnnotatorBackendError(f"{self.name}: {type(e).__name__}: {e}", prompt_id=prompt.prompt_id) from e
            return response.text or ""

        started = time.perf_counter()
        text = self._with_retries(call, prompt.prompt_id)
        latency_ms = (time.perf_counter() - started) * 1000
        return RawResponse(text=text, latency_ms=latency_ms, backend=self.name, prompt_id=prompt.prompt_id)
