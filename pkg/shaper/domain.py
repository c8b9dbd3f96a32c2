"""
Shaping configuration, the progress potential and the tabular learner's values.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Optional

import numpy as np

from keyroom.domain import Action, GridState

DEFAULT_LAYOUT_SEED = 0
LAST_EPISODES_WINDOW = 100


class ShapingMode(Enum):
    ADDITIVE = "additive"
    POTENTIAL = "potential"


class CreditPolicy(Enum):
    """Which critic answers release the subgoal bonus."""
    ACHIEVED = "achieved"  # the critic confirms the subgoal the transition achieved
    CLAIMED = "claimed"  # the critic marks any canonical subgoal true


def progress_potential(state: GridState) -> int:
    """Subgoals achieved so far: 1 once the key is held, 2 once the door is unlocked."""
    return int(state.key_held) + int(not state.door_locked)


@dataclass(frozen=True)
class ShapingConfig:
    source: Any = None  # a shaper.services.sources.SubgoalSource; None means the oracle
    mode: ShapingMode = ShapingMode.ADDITIVE
    subgoal_bonus: float = 1.0
    gamma: float = 0.99
    credit: CreditPolicy = CreditPolicy.ACHIEVED
    guarded: bool = True  # pay each subgoal at most once per trajectory
    potential: Optional[Callable[[GridState], float]] = progress_potential

    def __post_init__(self):
        if self.subgoal_bonus < 0:
            raise ValueError(f"subgoal_bonus must be >= 0, got {self.subgoal_bonus}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if self.mode is ShapingMode.POTENTIAL and self.potential is None:
            raise ValueError("potential-based shaping needs a potential function")


@dataclass(frozen=True)
class QLearningParams:
    alpha: float = 0.1
    gamma: float = 0.99
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    decay_fraction: float = 0.6  # share of the episodes over which epsilon decays
    step_cap: int = 200

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError(f"gamma must lie in [0, 1], got {self.gamma}")
        if not 0.0 <= self.epsilon_end <= self.epsilon_start <= 1.0:
            raise ValueError("epsilon must decay within [0, 1]")
        if not 0.0 < self.decay_fraction <= 1.0:
            raise ValueError(f"decay_fraction must lie in (0, 1], got {self.decay_fraction}")
        if self.step_cap < 1:
            raise ValueError("step_cap must be at least 1")


@dataclass(frozen=True, eq=False)
class QTable:
    """
    Action values keyed by state signature ``(agent_pos, key_held, door_locked)``.
    Rows are created on first write; unseen states read as zero.
    """
    alpha: float
    values: dict = field(default_factory=dict)

    def row(self, signature) -> np.ndarray:
        row = self.values.get(signature)
        if row is None:
            row = self.values[signature] = np.zeros(len(Action))
        return row

    def best_value(self, signature) -> float:
        row = self.values.get(signature)
        return 0.0 if row is None else float(row.max())

    def greedy(self, signature, rng: np.random.Generator) -> int:
        row = self.values.get(signature)
        if row is None:
            return int(rng.integers(len(Action)))
        best = np.flatnonzero(row == row.max())
        return int(best[0]) if len(best) == 1 else int(best[rng.integers(len(best))])

    def update(self, signature, action: int, target: float):
        row = self.row(signature)
        row[action] += self.alpha * (target - row[action])
        if not np.isfinite(row[action]):
            raise FloatingPointError(f"Q value for {signature} / {Action(action).label} is not finite")

    def snapshot(self) -> dict:
        return {signature: tuple(float(v) for v in row) for signature, row in self.values.items()}


@dataclass(frozen=True)
class EpisodeRecord:
    episode: int  # 1-based
    episode_return: float
    steps: int
    success: bool


@dataclass(frozen=True)
class LearningCurve:
    arm: str
    seed: int
    records: tuple
    q_table: Optional[QTable] = field(default=None, compare=False, repr=False)

    @property
    def episodes_to_first_success(self) -> Optional[int]:
        for record in self.records:
            if record.success:
                return record.episode
        return None

    def success_rate(self, last: int = LAST_EPISODES_WINDOW) -> float:
        window = self.records[-last:]
        return sum(r.success for r in window) / len(window) if window else 0.0


@dataclass(frozen=True, eq=False)
class OptimalValues:
    """Value-iteration result over the reachable non-terminal states."""
    states: tuple
    values: np.ndarray = field(repr=False)
    q_values: np.ndarray = field(repr=False)
    optimal_actions: dict  # signature -> frozenset of Action
    index: dict = field(repr=False)  # signature -> row
    iterations: int = 0

    def value(self, state: GridState) -> float:
        return float(self.values[self.index[state.signature]])
