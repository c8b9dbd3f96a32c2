from dataclasses import replace

from django.test import SimpleTestCase

from keyroom.domain import (
    KEY_PICKUP_MESSAGE,
    NEVER_MIND_MESSAGE,
    WALL_MESSAGE,
    Action,
    SubgoalEvent,
)
from keyroom.services.engine import EnvironmentContractError, detect_event, step, transition
from keyroom.services.layout import generate_layout, initial_state, passable
from keyroom.services.search import reachable_transitions
from keyroom.tests.scenes import key_pickup_transition, move_north_transition

MOVES = (Action.GO_NORTH, Action.GO_EAST, Action.GO_SOUTH, Action.GO_WEST)


class StepTest(SimpleTestCase):
    def setUp(self):
        self.layout = generate_layout(0)
        self.start = initial_state(self.layout)

    def test_pickup_on_key_tile(self):
        state = replace(self.start, agent_pos=self.layout.key_spawn)
        after, reward, event = step(state, Action.PICKUP)

        self.assertTrue(after.key_held)
        self.assertIsNone(after.key_on_floor)
        self.assertEqual(after.last_message, KEY_PICKUP_MESSAGE)
        self.assertEqual(event, SubgoalEvent.KEY_PICKED_UP)
        self.assertEqual(reward, 0)

    def test_pickup_elsewhere_changes_nothing(self):
        after, _, event = step(self.start, Action.PICKUP)
        self.assertFalse(after.key_held)
        self.assertEqual(after.key_on_floor, self.layout.key_spawn)
        self.assertEqual(event, SubgoalEvent.NONE)

    def test_walking_into_wall(self):
        """Top-left interior corner, going north hits the wall."""
        state = replace(self.start, agent_pos=(1, 1))
        after, _, event = step(state, Action.GO_NORTH)

        self.assertEqual(after.agent_pos, (1, 1))
        self.assertEqual(after.last_message, WALL_MESSAGE)
        self.assertEqual(event, SubgoalEvent.NONE)
        self.assertEqual(after.step_count, 1)

    def test_locked_door_blocks(self):
        door_x, door_y = self.layout.door_pos
        state = replace(self.start, agent_pos=(door_x - 1, door_y))
        after, _, _ = step(state, Action.GO_EAST)
        self.assertEqual(after.agent_pos, state.agent_pos)
        self.assertEqual(after.last_message, WALL_MESSAGE)

    def test_apply_with_key_next_to_door_unlocks(self):
        door_x, door_y = self.layout.door_pos
        state = replace(self.start, agent_pos=(door_x - 1, door_y), key_held=True, key_on_floor=None)
        after, _, event = step(state, Action.APPLY)

        self.assertFalse(after.door_locked)
        self.assertEqual(event, SubgoalEvent.DOOR_UNLOCKED)
        self.assertEqual(after.last_message, "")

        moved, _, _ = step(after, Action.GO_EAST)
        self.assertEqual(moved.agent_pos, self.layout.door_pos)

    def test_apply_without_key_never_unlocks(self):
        """Exhaustive over every reachable key-less state."""
        checked = 0
        for t in reachable_transitions(self.layout, limit=None):
            if t.action is Action.APPLY and not t.before.key_held:
                checked += 1
                self.assertTrue(t.after.door_locked)
                self.assertEqual(t.event, SubgoalEvent.NONE)
                self.assertEqual(t.after.last_message, NEVER_MIND_MESSAGE)
        self.assertGreater(checked, 0)

    def test_reaching_goal_terminates_with_reward(self):
        gx, gy = self.layout.goal_pos
        for action in MOVES:
            dx, dy = action.delta
            origin = (gx - dx, gy - dy)
            if passable(self.layout, origin, door_locked=False) and origin != self.layout.door_pos:
                break
        state = replace(self.start, agent_pos=origin, key_held=True, key_on_floor=None, door_locked=False)
        after, reward, event = step(state, action)

        self.assertEqual(after.agent_pos, self.layout.goal_pos)
        self.assertTrue(after.terminated)
        self.assertEqual(reward, 1)
        self.assertEqual(event, SubgoalEvent.NONE)

    def test_stepping_terminated_state_is_an_error(self):
        state = replace(self.start, terminated=True)
        with self.assertRaises(EnvironmentContractError):
            step(state, Action.GO_NORTH)

    def test_step_is_deterministic(self):
        for action in Action:
            self.assertEqual(step(self.start, action), step(self.start, action))

    def test_message_clears_after_one_step(self):
        t = move_north_transition()
        self.assertEqual(t.before.last_message, NEVER_MIND_MESSAGE)
        self.assertEqual(t.after.last_message, "")
        self.assertEqual(t.after.agent_pos, (4, 2))

    def test_appendix_pickup(self):
        t = key_pickup_transition()
        self.assertEqual(t.event, SubgoalEvent.KEY_PICKED_UP)
        self.assertEqual(t.after.agent_pos, t.before.agent_pos)


class DetectEventTest(SimpleTestCase):
    def setUp(self):
        self.start = initial_state(generate_layout(0))

    def test_key_flip(self):
        after = replace(self.start, key_held=True, key_on_floor=None)
        self.assertEqual(detect_event(self.start, after), SubgoalEvent.KEY_PICKED_UP)

    def test_door_flip(self):
        before = replace(self.start, key_held=True, key_on_floor=None)
        after = replace(before, door_locked=False)
        self.assertEqual(detect_event(before, after), SubgoalEvent.DOOR_UNLOCKED)

    def test_identical_states(self):
        self.assertEqual(detect_event(self.start, self.start), SubgoalEvent.NONE)

    def test_layouts_must_match(self):
        other = initial_state(generate_layout(1))
        with self.assertRaises(EnvironmentContractError):
            detect_event(self.start, other)


class TransitionIdTest(SimpleTestCase):
    def test_id_ignores_step_count(self):
        start = initial_state(generate_layout(0))
        later = replace(start, step_count=17)
        self.assertEqual(transition(start, Action.GO_WEST).id, transition(later, Action.GO_WEST).id)

    def test_id_depends_on_action_and_message(self):
        start = initial_state(generate_layout(0))
        self.assertNotEqual(transition(start, Action.GO_WEST).id, transition(start, Action.GO_EAST).id)
        noisy = replace(start, last_message=WALL_MESSAGE)
        self.assertNotEqual(transition(start, Action.GO_WEST).id, transition(noisy, Action.GO_WEST).id)
