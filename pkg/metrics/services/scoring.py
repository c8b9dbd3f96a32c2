import logging
from collections import defaultdict
from typing import Iterable

import numpy as np

from annotators.domain import AnnotationVerdict, ParseStatus
from datasets.domain import CategoryLabel, ReferenceLabels
from keyroom.domain import CANONICAL_SUBGOALS
from metrics.domain import ConfusionCounts, MetricsRow, PositivePolicy

logger = logging.getLogger(__name__)


class ScoringError(ValueError):
    """Raised when verdicts and reference labels do not cover the same transitions."""

    def __init__(self, message: str, missing=(), extra=()):
        super().__init__(message)
        self.missing = list(missing)
        self.extra = list(extra)


def prediction_positive(verdict: AnnotationVerdict, policy: PositivePolicy = PositivePolicy.LEXICON_FILTERED) -> bool:
    if verdict.parse_status is ParseStatus.UNPARSEABLE:
        return False
    if policy is PositivePolicy.ANY_TRUE:
        return any(value is True for value in verdict.subgoal_flags.values())
    return any(verdict.matched_canonical.values())


def _reference_flags(reference) -> tuple:
    """Scored flags by transition id, and the ids flagged as ambiguous."""
    if isinstance(reference, ReferenceLabels):
        flagged = reference.flagged_ids()
        return {tid: label.flags for tid, label in reference.labels.items() if tid not in flagged}, flagged
    return dict(reference), set()


def score(
    verdicts: Iterable[AnnotationVerdict],
    reference,
    policy: PositivePolicy = PositivePolicy.LEXICON_FILTERED,
) -> ConfusionCounts:
    """
    Binary confusion counts of one annotator's verdicts against the reference.
    A transition is reference-positive when any of its canonical flags is true.
    Transitions the reference flags as ambiguous are left out on both sides.
    """
    flags_by_id, flagged = _reference_flags(reference)
    by_id = {}
    for verdict in verdicts:
        if verdict.transition_id in flagged:
            continue
        if verdict.transition_id in by_id:
            raise ScoringError(f"two verdicts for transition {verdict.transition_id}", extra=[verdict.transition_id])
        by_id[verdict.transition_id] = verdict

    missing = sorted(set(flags_by_id) - set(by_id))
    extra = sorted(set(by_id) - set(flags_by_id))
    if missing or extra:
        raise ScoringError(
            f"verdicts and reference differ: {len(missing)} missing ({', '.join(missing[:5])}), "
            f"{len(extra)} extra ({', '.join(extra[:5])})",
            missing=missing,
            extra=extra,
        )

    tp = tn = fp = fn = 0
    for tid, flags in flags_by_id.items():
        actual = any(flags.get(name, False) for name in CANONICAL_SUBGOALS)
        predicted = prediction_positive(by_id[tid], policy)
        if predicted and actual:
            tp += 1
        elif predicted:
            fp += 1
        elif actual:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def derive(counts: ConfusionCounts) -> dict:
    """Precision, recall, F1 and accuracy; every undefined ratio is 0."""
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = (counts.tp + counts.tn) / counts.total if counts.total else 0.0
    return {"f1": f1, "accuracy": accuracy, "precision": precision, "recall": recall}


def metrics_row(annotator: str, config_name: str, counts: ConfusionCounts, unparseable: int = 0) -> MetricsRow:
    return MetricsRow(annotator=annotator, config_name=config_name, counts=counts,
                      unparseable=unparseable, **derive(counts))


def score_groups(verdicts: Iterable[AnnotationVerdict], reference,
                 policy: PositivePolicy = PositivePolicy.LEXICON_FILTERED) -> list:
    """One MetricsRow per (annotator, config) group found in ``verdicts``."""
    groups = defaultdict(list)
    for verdict in verdicts:
        groups[(verdict.annotator, verdict.config_name)].append(verdict)
    rows = []
    for (annotator, config_name), group in sorted(groups.items()):
        counts = score(group, reference, policy)
        unparseable = sum(1 for v in group if v.parse_status is ParseStatus.UNPARSEABLE)
        if unparseable:
            logger.info(f"[Scoring] {annotator} / {config_name}: {unparseable} unparseable replies scored negative")
        rows.append(metrics_row(annotator, config_name, counts, unparseable))
    return rows


def predicted_category(verdict: AnnotationVerdict):
    """3-class reading of a verdict; ``None`` when both canonical subgoals are claimed."""
    pickup, unlock = (verdict.matched_canonical.get(name, False) for name in CANONICAL_SUBGOALS)
    if pickup and unlock:
        return None
    if pickup:
        return CategoryLabel.KEY_PICKED_UP
    if unlock:
        return CategoryLabel.DOOR_UNLOCKED
    return CategoryLabel.NONE


def three_class_confusion(actual: Iterable[CategoryLabel], predicted: Iterable) -> np.ndarray:
    """Rows are actual categories, columns predicted ones plus a last column for ambiguous answers."""
    matrix = np.zeros((len(CategoryLabel), len(CategoryLabel) + 1), dtype=int)
    for a, p in zip(actual, predicted):
        matrix[int(a), len(CategoryLabel) if p is None else int(p)] += 1
    return matrix


def three_class_accuracy(matrix: np.ndarray) -> float:
    total = matrix.sum()
    return float(np.trace(matrix[:, :len(CategoryLabel)]) / total) if total else 0.0


def simulated_random_baseline(categories, seed: int = 0, trials: int = 100) -> dict:
    """
    Uniform 3-class guessing against ``categories``, averaged over ``trials``.
    Returns the 3-class accuracy and the binary metrics of the summed counts.
    """
    actual = np.array([int(c) for c in categories])
    if actual.size == 0:
        raise ValueError("no categories to guess")
    rng = np.random.default_rng(seed)
    guesses = rng.integers(0, len(CategoryLabel), size=(trials, actual.size))
    hits = (guesses == actual).mean()
    actual_pos = actual != int(CategoryLabel.NONE)
    guess_pos = guesses != int(CategoryLabel.NONE)
    counts = ConfusionCounts(
        tp=int(np.sum(guess_pos & actual_pos)),
        tn=int(np.sum(~guess_pos & ~actual_pos)),
        fp=int(np.sum(guess_pos & ~actual_pos)),
        fn=int(np.sum(~guess_pos & actual_pos)),
    )
    return {"three_class_accuracy": float(hits), "binary": derive(counts), "trials": trials}
