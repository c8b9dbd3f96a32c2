from collections import deque

from django.test import SimpleTestCase

from keyroom.domain import Action
from keyroom.services.engine import transition
from keyroom.services.layout import generate_layout, initial_state, passable
from keyroom.services.search import reachable_states, solve
from shaper.domain import DEFAULT_LAYOUT_SEED, ShapingConfig
from shaper.services.shaping import shaped_reward
from shaper.services.value_iteration import (
    ValueIterationError,
    potential_reward,
    sparse_reward,
    value_iteration,
)

GAMMA = 0.99


def distances_to(layout, target, door_locked=True):
    dist = {target: 0}
    queue = deque([target])
    while queue:
        x, y = queue.popleft()
        for dx, dy in ((0, -1), (1, 0), (0, 1), (-1, 0)):
            nxt = (x + dx, y + dy)
            if nxt not in dist and passable(layout, nxt, door_locked):
                dist[nxt] = dist[(x, y)] + 1
                queue.append(nxt)
    return dist


class ValueIterationTest(SimpleTestCase):
    def setUp(self):
        self.layout = generate_layout(DEFAULT_LAYOUT_SEED)

    def test_spawn_heads_for_the_key(self):
        result = value_iteration(self.layout, sparse_reward, GAMMA)
        spawn = initial_state(self.layout)
        optimal = result.optimal_actions[spawn.signature]
        self.assertTrue(optimal)
        dist = distances_to(self.layout, self.layout.key_spawn)
        for action in optimal:
            self.assertIsNotNone(action.delta, action.label)
            after = transition(spawn, action).after
            self.assertEqual(dist[after.agent_pos], dist[spawn.agent_pos] - 1)

    def test_potential_shaping_keeps_optimal_action_sets(self):
        for seed in (DEFAULT_LAYOUT_SEED, 1, 2):
            layout = generate_layout(seed)
            sparse = value_iteration(layout, sparse_reward, GAMMA)
            shaped = value_iteration(layout, potential_reward(GAMMA), GAMMA)
            self.assertEqual(set(sparse.optimal_actions), set(shaped.optimal_actions))
            for signature, actions in sparse.optimal_actions.items():
                self.assertEqual(actions, shaped.optimal_actions[signature], (seed, signature))

    def test_covers_every_reachable_state(self):
        result = value_iteration(self.layout, sparse_reward, GAMMA)
        self.assertEqual(len(result.states), len(reachable_states(self.layout)))
        steps = len(solve(self.layout))
        self.assertAlmostEqual(result.value(initial_state(self.layout)), GAMMA ** (steps - 1), delta=1e-9)

    def test_zero_gamma_is_the_best_one_step_reward(self):
        result = value_iteration(self.layout, sparse_reward, 0.0)
        for state in result.states:
            best = max(sparse_reward(transition(state, action)) for action in Action)
            self.assertEqual(result.value(state), best)

    def test_converged_values_are_a_fixed_point(self):
        result = value_iteration(self.layout, sparse_reward, GAMMA)
        for i, state in enumerate(result.states):
            backups = []
            for action in Action:
                t = transition(state, action)
                future = 0.0 if t.after.terminated else result.value(t.after)
                backups.append(t.task_reward + GAMMA * future)
            self.assertAlmostEqual(max(backups), result.values[i], delta=1e-9)

    def test_additive_oracle_values_dominate_sparse(self):
        sparse = value_iteration(self.layout, sparse_reward, GAMMA)
        config = ShapingConfig(guarded=False)
        additive = value_iteration(self.layout, lambda t: shaped_reward(t, config), GAMMA)
        for state in sparse.states:
            self.assertGreaterEqual(additive.value(state) + 1e-9, sparse.value(state))

    def test_iteration_cap(self):
        with self.assertRaises(ValueIterationError):
            value_iteration(self.layout, sparse_reward, GAMMA, max_iterations=1)

    def test_gamma_range(self):
        with self.assertRaises(ValueError):
            value_iteration(self.layout, sparse_reward, 1.5)
