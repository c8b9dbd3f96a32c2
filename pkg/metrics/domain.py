from dataclasses import dataclass
from enum import Enum

RANDOM_BASELINE = 1 / 3
RANDOM_BASELINE_NAME = "Random"


class PositivePolicy(Enum):
    """When a verdict counts as a positive prediction."""
    LEXICON_FILTERED = "lexicon-filtered"  # some lexicon-matched canonical flag is true
    ANY_TRUE = "any-true"  # any reported subgoal is true


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} cannot be negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn)


@dataclass(frozen=True)
class MetricsRow:
    """Metrics of one annotator on one prompt configuration, kept at full precision."""
    annotator: str
    config_name: str
    f1: float
    accuracy: float
    precision: float
    recall: float
    counts: ConfusionCounts
    unparseable: int = 0
