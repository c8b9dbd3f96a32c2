import logging
from dataclasses import replace

from keyroom.domain import (
    KEY_PICKUP_MESSAGE,
    NEVER_MIND_MESSAGE,
    NOTHING_HERE_MESSAGE,
    WALL_MESSAGE,
    Action,
    GridState,
    SubgoalEvent,
    Transition,
)
from keyroom.services.layout import passable

logger = logging.getLogger(__name__)


class EnvironmentContractError(RuntimeError):
    """Raised when the environment is driven outside its contract."""


def step(state: GridState, action) -> tuple:
    """
    Advances the room by one action.
    Returns ``(next_state, task_reward, event)``. The message of the previous
    step is cleared unless the action produces a new one.
    """
    if state.terminated:
        raise EnvironmentContractError(
            f"step() called on a terminated state at {state.agent_pos} (step {state.step_count})"
        )
    action = Action(action)
    layout = state.layout
    agent_pos = state.agent_pos
    key_on_floor = state.key_on_floor
    key_held = state.key_held
    door_locked = state.door_locked
    message = ""
    event = SubgoalEvent.NONE

    if action.delta is not None:
        dx, dy = action.delta
        target = (agent_pos[0] + dx, agent_pos[1] + dy)
        if passable(layout, target, door_locked):
            agent_pos = target
        else:
            message = WALL_MESSAGE
    elif action is Action.PICKUP:
        if key_on_floor is not None and key_on_floor == agent_pos:
            key_on_floor = None
            key_held = True
            message = KEY_PICKUP_MESSAGE
            event = SubgoalEvent.KEY_PICKED_UP
        else:
            message = NOTHING_HERE_MESSAGE
    elif key_held and door_locked and _next_to_door(state):
        door_locked = False
        event = SubgoalEvent.DOOR_UNLOCKED
    else:
        message = NEVER_MIND_MESSAGE

    terminated = layout.goal_pos is not None and agent_pos == layout.goal_pos
    after = replace(
        state,
        agent_pos=agent_pos,
        key_on_floor=key_on_floor,
        key_held=key_held,
        door_locked=door_locked,
        last_message=message,
        step_count=state.step_count + 1,
        terminated=terminated,
    )
    return after, int(terminated), event


def _next_to_door(state: GridState) -> bool:
    door = state.layout.door_pos
    if door is None:
        return False
    x, y = state.agent_pos
    return abs(x - door[0]) + abs(y - door[1]) == 1


def detect_event(before: GridState, after: GridState) -> SubgoalEvent:
    """Re-derives the subgoal event from two snapshots of the same layout."""
    if before.layout is not after.layout and before.layout != after.layout:
        raise EnvironmentContractError("detect_event() needs two snapshots of the same layout")
    if not before.key_held and after.key_held:
        return SubgoalEvent.KEY_PICKED_UP
    if before.door_locked and not after.door_locked:
        return SubgoalEvent.DOOR_UNLOCKED
    return SubgoalEvent.NONE


def transition(state: GridState, action) -> Transition:
    after, reward, event = step(state, action)
    return Transition(before=state, action=Action(action), after=after, task_reward=reward, event=event)
