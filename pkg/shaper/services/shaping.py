import logging
from typing import Optional

from keyroom.domain import SubgoalEvent, Transition
from shaper.domain import CreditPolicy, ShapingConfig, ShapingMode
from shaper.services.sources import OracleSource

logger = logging.getLogger(__name__)

ORACLE = OracleSource()


def fired_subgoals(t: Transition, config: ShapingConfig) -> set:
    """Canonical subgoals whose termination condition the source reports for ``t``."""
    flags = (config.source or ORACLE).matched(t)
    if config.credit is CreditPolicy.CLAIMED:
        return {name for name, value in flags.items() if value}
    if t.event is SubgoalEvent.NONE:
        return set()
    name = t.event.canonical_name
    return {name} if flags.get(name) else set()


def shaped_reward(t: Transition, config: ShapingConfig, paid: Optional[set] = None) -> float:
    """
    Task reward plus the shaping term. Additive mode adds the bonus when a
    subgoal fires; ``paid`` collects subgoals already rewarded in the current
    trajectory and is updated in place when the config is guarded.
    Potential mode adds ``gamma * phi(after) - phi(before)`` and ignores the source.
    """
    if config.mode is ShapingMode.POTENTIAL:
        return t.task_reward + config.gamma * config.potential(t.after) - config.potential(t.before)

    fired = fired_subgoals(t, config)
    if config.guarded and paid is not None:
        fired -= paid
        paid |= fired
    return t.task_reward + (config.subgoal_bonus if fired else 0.0)


def auxiliary_reward(t: Transition, config: ShapingConfig, paid: Optional[set] = None) -> float:
    return shaped_reward(t, config, paid) - t.task_reward


class Shaper:
    """Stateful shaping for one trajectory at a time; call ``reset`` between episodes."""

    def __init__(self, config: ShapingConfig):
        self.config = config
        self._paid = set()

    def reset(self):
        self._paid = set()

    @property
    def paid(self) -> frozenset:
        return frozenset(self._paid)

    def __call__(self, t: Transition) -> float:
        return shaped_reward(t, self.config, self._paid)
