# annotators/services/__init__.py
"""
Subgoal annotators:
- backends: Oracle, Mock, RecordedFile, HttpLlm and Gemini backends
- response_cache: read-through cache over the CachedResponse table
- response_parser: free-form reply -> subgoal flags
- lexicon: reported subgoal names -> canonical subgoals
- annotation_service: annotate, batch annotation and verdict files
"""

from .backends import (
    AnnotatorBackend,
    AnnotatorBackendError,
    GeminiBackend,
    HttpLlmBackend,
    MockBackend,
    OracleBackend,
    RecordedFileBackend,
    RecordedLookupError,
)
from .lexicon import DEFAULT_LEXICON, CanonicalLexicon, match_canonical
from .response_parser import parse_response
from .annotation_service import (
    AnnotationTally,
    VerdictLoadError,
    VerdictWriter,
    annotate,
    annotate_all,
    read_verdicts,
)
