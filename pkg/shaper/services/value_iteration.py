import logging
from typing import Callable

import numpy as np

from keyroom.domain import Action, GridLayout, Transition
from keyroom.services.engine import transition
from keyroom.services.search import reachable_states
from shaper.domain import OptimalValues, progress_potential

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-10
TIE_TOLERANCE = 1e-9
MAX_ITERATIONS = 100_000


class ValueIterationError(RuntimeError):
    """Raised when the values do not settle within the iteration cap."""


def sparse_reward(t: Transition) -> float:
    return float(t.task_reward)


def potential_reward(gamma: float, potential=progress_potential) -> Callable[[Transition], float]:
    def reward(t: Transition) -> float:
        return t.task_reward + gamma * potential(t.after) - potential(t.before)
    return reward


def value_iteration(
    layout: GridLayout,
    reward_fn: Callable[[Transition], float],
    gamma: float,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = MAX_ITERATIONS,
) -> OptimalValues:
    """
    Optimal values over every reachable non-terminal state, to within
    ``tolerance`` in sup-norm. Terminal states are worth 0. Each state's
    optimal action set holds every action within 1e-9 of the best.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    states = tuple(reachable_states(layout))
    index = {state.signature: i for i, state in enumerate(states)}
    n, m = len(states), len(Action)

    rewards = np.zeros((n, m))
    successor = np.zeros((n, m), dtype=int)
    continues = np.zeros((n, m))
    for i, state in enumerate(states):
        for action in Action:
            t = transition(state, action)
            rewards[i, action] = reward_fn(t)
            if not t.after.terminated:
                successor[i, action] = index[t.after.signature]
                continues[i, action] = 1.0

    # A sweep change below this bound keeps the remaining error under ``tolerance``.
    stop = tolerance * (1 - gamma) / gamma if 0.0 < gamma < 1.0 else tolerance
    values = np.zeros(n)
    for iteration in range(1, max_iterations + 1):
        updated = (rewards + gamma * continues * values[successor]).max(axis=1)
        change = float(np.max(np.abs(updated - values))) if n else 0.0
        values = updated
        if change < stop:
            break
    else:
        raise ValueIterationError(
            f"no convergence after {max_iterations} sweeps (last change {change:.3e}, gamma {gamma})"
        )

    q_values = rewards + gamma * continues * values[successor]
    best = q_values.max(axis=1)
    optimal = {
        state.signature: frozenset(Action(int(a)) for a in np.flatnonzero(q_values[i] >= best[i] - TIE_TOLERANCE))
        for i, state in enumerate(states)
    }
    logger.debug(f"[ValueIteration] {n} states settled after {iteration} sweeps")
    return OptimalValues(states=states, values=values, q_values=q_values,
                         optimal_actions=optimal, index=index, iterations=iteration)
