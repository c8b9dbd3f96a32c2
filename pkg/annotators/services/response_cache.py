import hashlib
import logging
import threading

from django.db import IntegrityError

from annotators.domain import RawResponse
from annotators.models import CachedResponse
from annotators.services.backends import AnnotatorBackend
from keyroom.domain import Transition
from promptkit.domain import PromptText

logger = logging.getLogger(__name__)


def prompt_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


class CachingBackend(AnnotatorBackend):
    """
    Read-through cache in front of another backend, keyed by
    (backend kind, model, prompt hash). Hits are also memoised in process so
    live reward shaping does not hit the database on every step.
    """

    def __init__(self, inner: AnnotatorBackend, *, use_database: bool = True):
        super().__init__(inner.name)
        self.inner = inner
        self.backend_id = inner.backend_id
        self.use_database = use_database
        self._memo = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    @property
    def model_name(self) -> str:
        return self.inner.model_name

    def complete(self, prompt: PromptText, transition: Transition) -> RawResponse:
        key = prompt_hash(prompt.text)
        with self._lock:
            memo = self._memo.get(key)
            if memo is not None:
                self.hits += 1
        if memo is not None:
            return self._as_response(memo, prompt)

        row = self._lookup(key)
        if row is not None:
            with self._lock:
                self.hits += 1
                self._memo[key] = row
            return self._as_response(row, prompt)

        with self._lock:
            self.misses += 1
        raw = self.inner.complete(prompt, transition)
        entry = (raw.text, raw.latency_ms)
        self._store(key, raw)
        with self._lock:
            self._memo.setdefault(key, entry)
        return raw

    def _lookup(self, key: str):
        if not self.use_database:
            return None
        row = (
            CachedResponse.objects.filter(
                backend_id=self.backend_id, model_name=self.model_name, prompt_hash=key
            )
            .values_list("raw_text", "latency_ms")
            .first()
        )
        return tuple(row) if row is not None else None

    def _store(self, key: str, raw: RawResponse):
        if not self.use_database:
            return
        with self._lock:
            try:
                _, created = CachedResponse.objects.get_or_create(
                    backend_id=self.backend_id,
                    model_name=self.model_name,
                    prompt_hash=key,
                    defaults={"raw_text": raw.text, "latency_ms": raw.latency_ms},
                )
            except IntegrityError:
                # Another process inserted the same key first; the stored row wins.
                created = False
        if not created:
            logger.debug(f"[ResponseCache] Kept existing entry for {key[:12]}")

    def _as_response(self, entry: tuple, prompt: PromptText) -> RawResponse:
        text, latency_ms = entry
        return RawResponse(
            text=text,
            latency_ms=latency_ms,
            backend=self.name,
            prompt_id=prompt.prompt_id,
            cached=True,
        )
