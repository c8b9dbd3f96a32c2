"""
Where the subgoal-termination signal comes from: the environment itself,
a verdict file written by the annotate command, or a live model behind the
response cache.
"""

import logging
import threading
from abc import ABC, abstractmethod
from typing import Iterable, Optional

from annotators.domain import AnnotationVerdict, ParseStatus
from annotators.services.annotation_service import annotate, read_verdicts
from annotators.services.backends import AnnotatorBackend
from annotators.services.lexicon import DEFAULT_LEXICON, CanonicalLexicon
from annotators.services.response_cache import CachingBackend
from keyroom.domain import Coord, Transition, canonical_flags
from promptkit.domain import PromptSpec
from promptkit.services.composer import compose

logger = logging.getLogger(__name__)


class MissingVerdictError(KeyError):
    """Raised when a verdict source has nothing for a transition."""

    def __init__(self, transition_id: str, detail: str = ""):
        super().__init__(transition_id)
        self.transition_id = transition_id
        self.detail = detail

    def __str__(self):
        text = f"no verdict for transition {self.transition_id}"
        return f"{text} ({self.detail})" if self.detail else text


class SubgoalSource(ABC):
    name = "source"

    @abstractmethod
    def matched(self, t: Transition) -> dict:
        """Canonical subgoal flags for ``t``; empty when the critic gave no usable answer."""


class OracleSource(SubgoalSource):
    name = "oracle"

    def matched(self, t: Transition) -> dict:
        return canonical_flags(t.event)


class _VerdictSource(SubgoalSource):
    """Reads the signal from annotation verdicts."""

    def __init__(self):
        self._warned = set()
        self._warn_lock = threading.Lock()

    def _flags(self, verdict: AnnotationVerdict) -> dict:
        if verdict.parse_status is ParseStatus.UNPARSEABLE:
            with self._warn_lock:
                first = verdict.transition_id not in self._warned
                self._warned.add(verdict.transition_id)
            if first:
                logger.warning(f"[Shaping] Unparseable verdict for {verdict.transition_id}; no subgoal credited")
            return {}
        return dict(verdict.matched_canonical)


class CachedVerdictSource(_VerdictSource):
    name = "cached"

    def __init__(self, verdicts: Iterable[AnnotationVerdict], *, config_name: Optional[str] = None,
                 label: str = "verdicts"):
        super().__init__()
        self.label = label
        self._by_id = {}
        configs = set()
        for verdict in verdicts:
            if config_name is not None and verdict.config_name != config_name:
                continue
            configs.add(verdict.config_name)
            if verdict.transition_id in self._by_id:
                raise ValueError(
                    f"{label}: several verdicts for transition {verdict.transition_id}; "
                    f"pick one configuration (found {sorted(configs)})"
                )
            self._by_id[verdict.transition_id] = verdict
        logger.info(f"[Shaping] {len(self._by_id)} cached verdicts from {label}")

    @classmethod
    def from_file(cls, path, *, config_name: Optional[str] = None) -> "CachedVerdictSource":
        return cls(read_verdicts(path), config_name=config_name, label=str(path))

    def __len__(self):
        return len(self._by_id)

    def matched(self, t: Transition) -> dict:
        verdict = self._by_id.get(t.id)
        if verdict is None:
            raise MissingVerdictError(t.id, self.label)
        return self._flags(verdict)


class LiveBackendSource(_VerdictSource):
    """
    Asks a backend during training. Calls go through the response cache and an
    in-process memo, so each distinct transition costs at most one model call.
    """

    name = "live"

    def __init__(self, backend: AnnotatorBackend, spec: PromptSpec, *,
                 lexicon: CanonicalLexicon = DEFAULT_LEXICON, origin: Optional[Coord] = None,
                 use_database: bool = True):
        super().__init__()
        if not isinstance(backend, CachingBackend):
            backend = CachingBackend(backend, use_database=use_database)
        self.backend = backend
        self.spec = spec
        self.lexicon = lexicon
        self.origin = origin
        self._memo = {}
        self._lock = threading.Lock()

    def matched(self, t: Transition) -> dict:
        with self._lock:
            verdict = self._memo.get(t.id)
        if verdict is None:
            prompt = compose(self.spec, t, origin=self.origin)
            verdict = annotate(self.backend, prompt, t, lexicon=self.lexicon)
            with self._lock:
                verdict = self._memo.setdefault(t.id, verdict)
        return self._flags(verdict)

    @property
    def calls(self) -> int:
        return len(self._memo)
