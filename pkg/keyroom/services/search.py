import logging
from collections import deque
from typing import Iterator, Optional

from keyroom.domain import Action, GridLayout, GridState, SubgoalEvent, Transition
from keyroom.services.engine import transition
from keyroom.services.layout import LayoutError, initial_state

logger = logging.getLogger(__name__)

DEFAULT_EXPANSION_LIMIT = 10_000


def reachable_transitions(
    layout: GridLayout,
    limit: Optional[int] = DEFAULT_EXPANSION_LIMIT,
    *,
    with_messages: bool = False,
    start: Optional[GridState] = None,
) -> Iterator[Transition]:
    """
    Breadth-first enumeration of every transition out of the reachable states.

    States are deduplicated by signature, or by (signature, message) when
    ``with_messages`` is set, so each distinct prompt-visible situation shows up.
    ``limit`` caps the number of expanded states.
    """
    start = start or initial_state(layout)
    key = _key_fn(with_messages)
    seen = {key(start)}
    queue = deque([start])
    expanded = 0
    while queue:
        if limit is not None and expanded >= limit:
            logger.warning(f"[Search] Expansion limit {limit} reached with {len(queue)} states queued")
            return
        state = queue.popleft()
        expanded += 1
        for action in Action:
            t = transition(state, action)
            yield t
            if t.after.terminated:
                continue
            k = key(t.after)
            if k not in seen:
                seen.add(k)
                queue.append(t.after)


def _key_fn(with_messages: bool):
    if with_messages:
        return lambda s: (s.signature, s.last_message)
    return lambda s: s.signature


def reachable_states(layout: GridLayout) -> list:
    """Non-terminal states reachable from the spawn, one per signature."""
    states = {}
    start = initial_state(layout)
    states[start.signature] = start
    for t in reachable_transitions(layout, limit=None):
        if not t.after.terminated:
            states.setdefault(t.after.signature, t.after)
    return list(states.values())


def enumerate_transitions(layout: GridLayout) -> list:
    """Every transition an agent can meet on this layout, one per id."""
    unique = {}
    for t in reachable_transitions(layout, limit=None, with_messages=True):
        unique.setdefault(t.id, t)
    return list(unique.values())


def solve(layout: GridLayout, start: Optional[GridState] = None) -> list:
    """Shortest action sequence from ``start`` (default: spawn) to the goal."""
    start = start or initial_state(layout)
    parents = {start.signature: None}
    queue = deque([start])
    while queue:
        state = queue.popleft()
        for action in Action:
            t = transition(state, action)
            sig = t.after.signature
            if sig in parents:
                continue
            parents[sig] = (state.signature, action)
            if t.after.terminated:
                return _unwind(parents, sig)
            queue.append(t.after)
    raise LayoutError("goal is not reachable from the spawn state")


def _unwind(parents: dict, sig) -> list:
    plan = []
    while parents[sig] is not None:
        sig, action = parents[sig]
        plan.append(action)
    plan.reverse()
    return plan


def event_order(plan_transitions) -> list:
    return [t.event for t in plan_transitions if t.event is not SubgoalEvent.NONE]
