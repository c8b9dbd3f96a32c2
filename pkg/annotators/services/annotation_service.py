"""
Annotation pipeline: backend call, parsing, lexicon matching and verdict
persistence. Verdicts are appended to a JSONL file by a single writer.
"""

import concurrent.futures
import json
import logging
import statistics
import threading
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional

from django.conf import settings
from django.db import connection
from tqdm import tqdm

from annotators.domain import AnnotationVerdict, ParseStatus
from annotators.serializers import VerdictRecordSerializer
from annotators.services.backends import AnnotatorBackend, AnnotatorBackendError, RecordedLookupError
from annotators.services.lexicon import DEFAULT_LEXICON, CanonicalLexicon, match_canonical
from annotators.services.response_parser import parse_response
from annotators.services.token_service import TokenService
from keyroom.domain import Transition, canonical_json
from promptkit.domain import PromptText

logger = logging.getLogger(__name__)


class VerdictLoadError(ValueError):
    """Raised for malformed verdict files; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: Optional[int] = None):
        super().__init__(f"line {lineno}: {message}" if lineno else message)
        self.lineno = lineno


def raw_response_cap() -> int:
    return int(getattr(settings, "CALM_RAW_RESPONSE_CAP", 16384))


def annotate(
    backend: AnnotatorBackend,
    prompt: PromptText,
    transition: Transition,
    *,
    lexicon: CanonicalLexicon = DEFAULT_LEXICON,
    raw_cap: Optional[int] = None,
) -> AnnotationVerdict:
    """Asks ``backend`` about one prompt. A reply that cannot be parsed is still a verdict."""
    if prompt.transition_id != transition.id:
        raise ValueError(f"prompt {prompt.prompt_id} was composed for {prompt.transition_id}, not {transition.id}")
    raw = backend.complete(prompt, transition)
    return verdict_from_raw(raw, prompt, transition, lexicon=lexicon, raw_cap=raw_cap)


def verdict_from_raw(raw, prompt: PromptText, transition: Transition, *,
                     lexicon: CanonicalLexicon = DEFAULT_LEXICON, raw_cap: Optional[int] = None) -> AnnotationVerdict:
    flags, status = parse_response(raw.text)
    if status is ParseStatus.UNPARSEABLE:
        logger.warning(f"[Annotate] {raw.backend} reply to {prompt.prompt_id} could not be parsed")
        flags = {}
    capped = TokenService.cap_bytes(raw.text, raw_cap if raw_cap is not None else raw_response_cap())
    if capped != raw.text:
        raw = replace(raw, text=capped)
    return AnnotationVerdict(
        transition_id=transition.id,
        config_name=prompt.config_name,
        subgoal_flags=flags,
        matched_canonical=match_canonical(flags, lexicon),
        parse_status=status,
        raw=raw,
    )


class VerdictWriter:
    """Append-only JSONL writer; every record is flushed as soon as it is written."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._handle = None

    def __enter__(self):
        self.open()
        return self

    def __exit__(self, *exc):
        self.close()

    def open(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = self.path.open("a", encoding="utf-8")

    def write(self, verdict: AnnotationVerdict):
        line = canonical_json(verdict.to_record()) + "\n"
        with self._lock:
            if self._handle is None:
                self.open()
            self._handle.write(line)
            self._handle.flush()

    def close(self):
        with self._lock:
            if self._handle is not None:
                self._handle.close()
                self._handle = None


def read_verdicts(path) -> list:
    """Loads and validates a verdicts.jsonl file."""
    path = Path(path)
    if not path.exists():
        raise VerdictLoadError(f"verdict file not found: {path}")
    verdicts = []
    with path.open(encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except ValueError as e:
                raise VerdictLoadError(f"invalid JSON ({e})", lineno) from e
            serializer = VerdictRecordSerializer(data=record)
            if not serializer.is_valid():
                raise VerdictLoadError(f"invalid verdict record: {dict(serializer.errors)}", lineno)
            verdicts.append(AnnotationVerdict.from_record(record))
    logger.info(f"[Verdicts] Loaded {len(verdicts)} verdicts from {path.name}")
    return verdicts


def recorded_keys(path) -> set:
    """``(annotator, prompt_id)`` pairs already in a verdict file."""
    path = Path(path)
    if not path.exists():
        return set()
    return {(verdict.annotator, verdict.raw.prompt_id) for verdict in read_verdicts(path)}


@dataclass
class AnnotationTally:
    """Cost summary of an annotation run."""
    prompts: int = 0
    prompt_tokens: int = 0
    response_tokens: int = 0
    cache_hits: int = 0
    skipped: int = 0
    latencies: list = field(default_factory=list)
    statuses: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def add(self, prompt: PromptText, verdict: AnnotationVerdict):
        self.prompts += 1
        self.prompt_tokens += TokenService.estimate_tokens(prompt.text)
        self.response_tokens += TokenService.estimate_tokens(verdict.raw.text)
        if verdict.raw.cached:
            self.cache_hits += 1
        else:
            self.latencies.append(verdict.raw.latency_ms)
        key = verdict.parse_status.value
        self.statuses[key] = self.statuses.get(key, 0) + 1

    def summary(self) -> dict:
        return {
            "prompts": self.prompts,
            "skipped": self.skipped,
            "failed": len(self.failures),
            "estimated_prompt_tokens": self.prompt_tokens,
            "estimated_response_tokens": self.response_tokens,
            "mean_latency_ms": round(statistics.fmean(self.latencies), 1) if self.latencies else 0.0,
            "max_latency_ms": round(max(self.latencies), 1) if self.latencies else 0.0,
            "cache_hits": self.cache_hits,
            "parse_status": dict(sorted(self.statuses.items())),
        }


def annotate_all(
    backend: AnnotatorBackend,
    jobs: Iterable,
    *,
    writer: Optional[VerdictWriter] = None,
    parallel: int = 1,
    lexicon: CanonicalLexicon = DEFAULT_LEXICON,
    skip_keys: Optional[set] = None,
    progress: bool = False,
) -> tuple:
    """
    Annotates ``(prompt, transition)`` jobs with up to ``parallel`` concurrent calls.
    Verdicts are written in job order. Backend failures are collected in the
    tally instead of aborting the run. Returns ``(verdicts, tally)``.
    """
    tally = AnnotationTally()
    skip_keys = skip_keys or set()
    pending = []
    for prompt, transition in jobs:
        if (backend.name, prompt.prompt_id) in skip_keys:
            tally.skipped += 1
            continue
        pending.append((prompt, transition))
    if tally.skipped:
        logger.info(f"[Annotate] Skipping {tally.skipped} prompts already in the verdict file")

    results = {}
    next_to_write = 0
    verdicts = []

    def work(prompt, transition):
        try:
            return annotate(backend, prompt, transition, lexicon=lexicon)
        finally:
            if threading.current_thread() is not threading.main_thread():
                connection.close()

    def flush_ready():
        nonlocal next_to_write
        while next_to_write in results:
            verdict = results.pop(next_to_write)
            if verdict is not None:
                verdicts.append(verdict)
                tally.add(pending[next_to_write][0], verdict)
                if writer is not None:
                    writer.write(verdict)
            next_to_write += 1

    with tqdm(total=len(pending), desc=f"Annotating with {backend.name}", unit="prompt",
              disable=not progress) as bar:
        if parallel <= 1:
            for index, (prompt, transition) in enumerate(pending):
                results[index] = _guarded(annotate, backend, prompt, transition, lexicon, tally)
                flush_ready()
                bar.update(1)
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=parallel) as executor:
                futures = {
                    executor.submit(work, prompt, transition): index
                    for index, (prompt, transition) in enumerate(pending)
                }
                for future in concurrent.futures.as_completed(futures):
                    index = futures[future]
                    try:
                        results[index] = future.result()
                    except (AnnotatorBackendError, RecordedLookupError) as e:
                        _record_failure(tally, pending[index][0], e)
                        results[index] = None
                    flush_ready()
                    bar.update(1)

    if tally.failures:
        logger.error(f"[Annotate] {len(tally.failures)} prompts failed with {backend.name}")
    return verdicts, tally


def _guarded(fn, backend, prompt, transition, lexicon, tally):
    try:
        return fn(backend, prompt, transition, lexicon=lexicon)
    except (AnnotatorBackendError, RecordedLookupError) as e:
        _record_failure(tally, prompt, e)
        return None


def _record_failure(tally: AnnotationTally, prompt: PromptText, error: Exception):
    logger.error(f"[Annotate] {prompt.prompt_id} ({prompt.config_name}) failed: {error}")
    tally.failures.append({"prompt_id": prompt.prompt_id, "transition_id": prompt.transition_id,
                           "error": str(error)})
