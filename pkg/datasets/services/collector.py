import logging
from typing import Optional

import numpy as np
from django.utils import timezone

from datasets.domain import (
    LAYOUT_POLICY_ENUMERATED,
    LAYOUT_POLICY_PER_EPISODE,
    CategoryLabel,
    DatasetManifest,
)
from keyroom.domain import Action
from keyroom.services.engine import transition
from keyroom.services.layout import DEFAULT_LAYOUT_CONFIG, LayoutConfig, generate_layout, initial_state
from keyroom.services.search import enumerate_transitions, solve

logger = logging.getLogger(__name__)

DEFAULT_STEP_CAP = 200
DEFAULT_MAX_ROLLOUTS = 20_000


class DatasetCollectionError(RuntimeError):
    """Raised when the rollout budget runs out before every category bucket is full."""


def category_targets(size: int) -> dict:
    """
    Equal thirds; the remainder goes to key pickups first, then unlocks,
    so 256 splits 85 / 86 / 85 (none / pickup / unlock).
    """
    if size < len(CategoryLabel):
        raise ValueError(f"dataset size must be at least {len(CategoryLabel)}, got {size}")
    base, remainder = divmod(size, len(CategoryLabel))
    return {
        CategoryLabel.NONE: base,
        CategoryLabel.KEY_PICKED_UP: base + (remainder >= 1),
        CategoryLabel.DOOR_UNLOCKED: base + (remainder >= 2),
    }


class _Buckets:
    """Per-category reservoirs over the stream of distinct harvested transitions."""

    def __init__(self, targets: dict, rng: np.random.Generator):
        self.targets = targets
        self.rng = rng
        self.items = {category: [] for category in targets}
        self.seen = {category: 0 for category in targets}
        self.seen_ids = set()
        self.assisted_ids = set()

    def offer(self, t, assisted: bool):
        if t.id in self.seen_ids:
            return
        self.seen_ids.add(t.id)
        if assisted:
            self.assisted_ids.add(t.id)
        category = CategoryLabel.from_event(t.event)
        target = self.targets[category]
        self.seen[category] += 1
        bucket = self.items[category]
        if len(bucket) < target:
            bucket.append(t)
            return
        slot = int(self.rng.integers(self.seen[category]))
        if slot < target:
            bucket[slot] = t

    def full(self, category: CategoryLabel) -> bool:
        return len(self.items[category]) >= self.targets[category]

    def all_full(self) -> bool:
        return all(self.full(category) for category in self.targets)

    def describe(self) -> str:
        return ", ".join(
            f"{category.key}={len(self.items[category])}/{self.targets[category]}" for category in self.targets
        )


def collect_balanced(
    seed: int,
    size: int,
    max_rollouts: int = DEFAULT_MAX_ROLLOUTS,
    *,
    layout_config: LayoutConfig = DEFAULT_LAYOUT_CONFIG,
    step_cap: int = DEFAULT_STEP_CAP,
    assisted: bool = True,
    created_at: Optional[str] = None,
) -> DatasetManifest:
    """
    Plays uniform-random episodes on fresh layouts and keeps a balanced sample
    of their transitions. When ``assisted`` is set, every other episode starts
    with the scripted solution up to the rare action still needed (apply, else
    pickup) and only the random suffix is harvested.
    """
    targets = category_targets(size)
    rng = np.random.default_rng(seed)
    buckets = _Buckets(targets, rng)
    assisted_rollouts = 0
    episodes = 0

    while not buckets.all_full():
        if episodes >= max_rollouts:
            raise DatasetCollectionError(
                f"rollout budget of {max_rollouts} exhausted before buckets filled ({buckets.describe()}); "
                f"unlock events are rare under random play, raise --max-rollouts or enable assisted rollouts"
            )
        layout = generate_layout(int(rng.integers(2**31 - 1)), layout_config)
        state = initial_state(layout)

        scripted = assisted and episodes % 2 == 1 and not (
            buckets.full(CategoryLabel.DOOR_UNLOCKED) and buckets.full(CategoryLabel.KEY_PICKED_UP)
        )
        if scripted:
            rare = Action.APPLY if not buckets.full(CategoryLabel.DOOR_UNLOCKED) else Action.PICKUP
            plan = solve(layout)
            for action in plan[:plan.index(rare)]:
                state = transition(state, action).after
            assisted_rollouts += 1

        while not state.terminated and state.step_count < step_cap:
            t = transition(state, Action(int(rng.integers(len(Action)))))
            buckets.offer(t, scripted)
            state = t.after
        episodes += 1

    chosen = [t for category in targets for t in buckets.items[category]]
    order = rng.permutation(len(chosen))
    transitions = tuple(chosen[int(i)] for i in order)
    logger.info(
        f"[Collector] Seed {seed}: {size} transitions from {episodes} episodes "
        f"({assisted_rollouts} assisted, {buckets.describe()})"
    )
    return DatasetManifest(
        transitions=transitions,
        seed=seed,
        created_at=created_at or timezone.now().isoformat(),
        layout_policy=LAYOUT_POLICY_PER_EPISODE,
        step_cap=step_cap,
        assisted_rollouts=assisted_rollouts,
        assisted=frozenset(t.id for t in transitions if t.id in buckets.assisted_ids),
    )


def collect_layout(
    layout_seed: int,
    *,
    layout_config: LayoutConfig = DEFAULT_LAYOUT_CONFIG,
    created_at: Optional[str] = None,
) -> DatasetManifest:
    """Every transition an agent can meet on one layout, for cached-verdict training."""
    layout = generate_layout(layout_seed, layout_config)
    transitions = tuple(enumerate_transitions(layout))
    logger.info(f"[Collector] Layout {layout_seed}: {len(transitions)} distinct transitions")
    return DatasetManifest(
        transitions=transitions,
        seed=layout_seed,
        created_at=created_at or timezone.now().isoformat(),
        layout_policy=LAYOUT_POLICY_ENUMERATED,
        step_cap=0,
    )
