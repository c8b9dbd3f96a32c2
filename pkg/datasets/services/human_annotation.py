import logging
import threading
from pathlib import Path
from typing import Optional

from datasets.domain import DatasetManifest, ReferenceLabel
from datasets.services.storage import load_reference, reference_record
from keyroom.domain import CANONICAL_SUBGOALS, Transition, canonical_json
from promptkit.services.composer import compose, get_config

logger = logging.getLogger(__name__)

ANSWERS = {"y": True, "yes": True, "n": False, "no": False, "s": None, "skip": None}
FLAG_NOTE = "ambiguous"


def parse_answer(text: str) -> Optional[bool]:
    """``y`` / ``n`` / ``s``; ``None`` flags the prompt as ambiguous."""
    key = (text or "").strip().lower()
    if key not in ANSWERS:
        raise ValueError(f"expected y, n or s, got {text!r}")
    return ANSWERS[key]


class HumanAnnotationSession:
    """
    Walks a human through every prompt of a dataset. Each answered prompt is
    appended to the reference file straight away, so an interrupted session
    resumes where it stopped. A skipped prompt is stored as a flagged label,
    which scoring leaves out and a resumed session does not ask again.
    """

    def __init__(self, manifest: DatasetManifest, path, annotator_id: str, config_name: str = "gamescreen-provided"):
        self.manifest = manifest
        self.path = Path(path)
        self.annotator_id = annotator_id
        self.spec = get_config(config_name)
        self._lock = threading.Lock()
        self.done = set()
        if self.path.exists():
            self.done = set(load_reference(self.path).labels)
            logger.info(f"[HumanAnnotation] Resuming: {len(self.done)} of {manifest.size} already labelled")

    @property
    def subgoals(self) -> tuple:
        return CANONICAL_SUBGOALS

    def pending(self) -> list:
        return [t for t in self.manifest.transitions if t.id not in self.done]

    def prompt_text(self, t: Transition) -> str:
        return compose(self.spec, t).text

    def record(self, t: Transition, answers: dict, note: str = "") -> bool:
        """
        Stores one answer set. A missing or ``None`` answer flags the transition;
        its other flags keep the answers given before the skip. Returns False
        for a flagged label.
        """
        flagged = any(answers.get(name) is None for name in CANONICAL_SUBGOALS)
        if flagged:
            logger.debug(f"[HumanAnnotation] Flagged {t.id} as ambiguous")
        label = ReferenceLabel(
            flags={name: bool(answers.get(name)) for name in CANONICAL_SUBGOALS},
            annotator_id=self.annotator_id,
            note=note or (FLAG_NOTE if flagged else ""),
            flagged=flagged,
        )
        line = canonical_json(reference_record(t.id, label)) + "\n"
        with self._lock:
            if t.id in self.done:
                raise ValueError(f"transition {t.id} is already labelled")
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as handle:
                handle.write(line)
                handle.flush()
            self.done.add(t.id)
        return not flagged

    @property
    def complete(self) -> bool:
        return not self.pending()
