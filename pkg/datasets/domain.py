from dataclasses import dataclass, field
from enum import IntEnum

from keyroom.domain import SubgoalEvent

SCHEMA_VERSION = 1
GENERATOR_VERSION = "1.0.0"

LAYOUT_POLICY_PER_EPISODE = "one layout per episode"
LAYOUT_POLICY_ENUMERATED = "single layout, every reachable transition"


class CategoryLabel(IntEnum):
    NONE = 0
    KEY_PICKED_UP = 1
    DOOR_UNLOCKED = 2

    @classmethod
    def from_event(cls, event: SubgoalEvent) -> "CategoryLabel":
        return _EVENT_CATEGORIES[event]

    @property
    def event(self) -> SubgoalEvent:
        return _CATEGORY_EVENTS[self]

    @property
    def key(self) -> str:
        return self.name.lower()


_EVENT_CATEGORIES = {
    SubgoalEvent.NONE: CategoryLabel.NONE,
    SubgoalEvent.KEY_PICKED_UP: CategoryLabel.KEY_PICKED_UP,
    SubgoalEvent.DOOR_UNLOCKED: CategoryLabel.DOOR_UNLOCKED,
}
_CATEGORY_EVENTS = {category: event for event, category in _EVENT_CATEGORIES.items()}


@dataclass(frozen=True)
class DatasetManifest:
    """
    An evaluation dataset. ``assisted`` holds the ids of transitions harvested
    after a scripted prefix; ``extra`` and ``record_extras`` keep fields this
    version does not know about so they survive a load/save cycle.
    """
    transitions: tuple
    seed: int
    created_at: str
    generator_version: str = GENERATOR_VERSION
    schema_version: int = SCHEMA_VERSION
    layout_policy: str = LAYOUT_POLICY_PER_EPISODE
    step_cap: int = 200
    assisted_rollouts: int = 0
    assisted: frozenset = frozenset()
    extra: dict = field(default_factory=dict, compare=False)
    record_extras: dict = field(default_factory=dict, compare=False)

    @property
    def counts(self) -> dict:
        counts = {category: 0 for category in CategoryLabel}
        for t in self.transitions:
            counts[CategoryLabel.from_event(t.event)] += 1
        return counts

    @property
    def size(self) -> int:
        return len(self.transitions)

    def by_id(self) -> dict:
        return {t.id: t for t in self.transitions}


@dataclass(frozen=True)
class ReferenceLabel:
    flags: dict  # canonical name -> bool
    annotator_id: str
    note: str = ""
    flagged: bool = False  # the annotator found the transition ambiguous; left out of scoring
    extra: dict = field(default_factory=dict, compare=False)  # unknown record fields, written back on save


@dataclass(frozen=True)
class ReferenceLabels:
    labels: dict  # transition id -> ReferenceLabel, in file order

    def __len__(self):
        return len(self.labels)

    def __getitem__(self, transition_id: str) -> ReferenceLabel:
        return self.labels[transition_id]

    def __contains__(self, transition_id) -> bool:
        return transition_id in self.labels

    def missing_from(self, manifest: DatasetManifest) -> list:
        return [t.id for t in manifest.transitions if t.id not in self.labels]

    def flagged_ids(self) -> set:
        return {tid for tid, label in self.labels.items() if label.flagged}
