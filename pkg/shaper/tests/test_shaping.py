import numpy as np
from django.test import SimpleTestCase

from keyroom.domain import Action, SubgoalEvent
from keyroom.services.engine import transition
from keyroom.services.layout import generate_layout, initial_state
from keyroom.services.search import solve
from keyroom.tests.scenes import key_pickup_transition, move_north_transition
from shaper.domain import DEFAULT_LAYOUT_SEED, CreditPolicy, ShapingConfig, ShapingMode, progress_potential
from shaper.services.shaping import Shaper, auxiliary_reward, shaped_reward
from shaper.services.sources import SubgoalSource

PICKUP = "pick up the key"
UNLOCK = "open the door"


class ClaimingSource(SubgoalSource):
    """Claims the same flags for every transition."""

    name = "claiming"

    def __init__(self, flags):
        self.flags = flags

    def matched(self, t):
        return dict(self.flags)


def optimal_trajectory(layout):
    state = initial_state(layout)
    trajectory = []
    for action in solve(layout):
        t = transition(state, action)
        trajectory.append(t)
        state = t.after
    return trajectory


def random_trajectory(layout, rng, max_steps):
    state = initial_state(layout)
    trajectory = []
    while not state.terminated and len(trajectory) < max_steps:
        t = transition(state, int(rng.integers(len(Action))))
        trajectory.append(t)
        state = t.after
    return trajectory


class ShapedRewardTest(SimpleTestCase):
    def test_oracle_pickup_earns_the_bonus(self):
        self.assertEqual(shaped_reward(key_pickup_transition(), ShapingConfig()), 1.0)

    def test_plain_move_earns_nothing(self):
        self.assertEqual(shaped_reward(move_north_transition(), ShapingConfig()), 0.0)

    def test_goal_transition_keeps_task_reward(self):
        last = optimal_trajectory(generate_layout(DEFAULT_LAYOUT_SEED))[-1]
        self.assertEqual((last.task_reward, last.event), (1, SubgoalEvent.NONE))
        self.assertEqual(shaped_reward(last, ShapingConfig()), 1.0)

    def test_potential_pickup_with_unit_gamma(self):
        config = ShapingConfig(mode=ShapingMode.POTENTIAL, gamma=1.0)
        self.assertEqual(shaped_reward(key_pickup_transition(), config), 1.0)

    def test_zero_bonus_is_the_task_reward(self):
        config = ShapingConfig(subgoal_bonus=0.0)
        for t in optimal_trajectory(generate_layout(3)):
            self.assertEqual(shaped_reward(t, config), t.task_reward)

    def test_bonus_magnitude(self):
        self.assertEqual(auxiliary_reward(key_pickup_transition(), ShapingConfig(subgoal_bonus=0.25)), 0.25)


class PotentialTest(SimpleTestCase):
    def test_progress_potential(self):
        t = key_pickup_transition()
        self.assertEqual(progress_potential(t.before), 0)
        self.assertEqual(progress_potential(t.after), 1)

    def test_optimal_trajectory_collects_two(self):
        config = ShapingConfig(mode=ShapingMode.POTENTIAL, gamma=1.0)
        trajectory = optimal_trajectory(generate_layout(DEFAULT_LAYOUT_SEED))
        self.assertEqual(sum(auxiliary_reward(t, config) for t in trajectory), 2)

    def test_telescoping_on_random_trajectories(self):
        config = ShapingConfig(mode=ShapingMode.POTENTIAL, gamma=1.0)
        rng = np.random.default_rng(11)
        layouts = [generate_layout(seed) for seed in range(10)]
        for n in range(1000):
            trajectory = random_trajectory(layouts[n % 10], rng, max_steps=int(rng.integers(1, 80)))
            total = sum(auxiliary_reward(t, config) for t in trajectory)
            expected = progress_potential(trajectory[-1].after) - progress_potential(trajectory[0].before)
            self.assertEqual(total, expected)

    def test_potential_never_decreases(self):
        rng = np.random.default_rng(5)
        for seed in range(5):
            for t in random_trajectory(generate_layout(seed), rng, max_steps=200):
                self.assertGreaterEqual(progress_potential(t.after), progress_potential(t.before))


class GuardTest(SimpleTestCase):
    def test_oracle_pays_each_subgoal_once(self):
        rng = np.random.default_rng(2)
        layout = generate_layout(DEFAULT_LAYOUT_SEED)
        shaper = Shaper(ShapingConfig())
        for _ in range(50):
            shaper.reset()
            rewards = [shaper(t) for t in random_trajectory(layout, rng, max_steps=300)]
            self.assertTrue(all(0.0 <= r <= 2.0 for r in rewards))
            bonus_steps = sum(1 for r in rewards if r >= 1.0)
            self.assertLessEqual(bonus_steps, 3)

    def test_claimed_credit_is_guarded(self):
        config = ShapingConfig(source=ClaimingSource({PICKUP: True, UNLOCK: False}), credit=CreditPolicy.CLAIMED)
        shaper = Shaper(config)
        rewards = [shaper(move_north_transition()) for _ in range(3)]
        self.assertEqual(rewards, [1.0, 0.0, 0.0])
        self.assertEqual(shaper.paid, {PICKUP})
        shaper.reset()
        self.assertEqual(shaper(move_north_transition()), 1.0)

    def test_unguarded_pays_every_time(self):
        config = ShapingConfig(source=ClaimingSource({PICKUP: True, UNLOCK: False}),
                               credit=CreditPolicy.CLAIMED, guarded=False)
        shaper = Shaper(config)
        self.assertEqual([shaper(move_north_transition()) for _ in range(3)], [1.0, 1.0, 1.0])

    def test_achieved_credit_ignores_other_claims(self):
        source = ClaimingSource({PICKUP: False, UNLOCK: True})
        t = key_pickup_transition()
        self.assertEqual(shaped_reward(t, ShapingConfig(source=source)), 0.0)
        self.assertEqual(shaped_reward(t, ShapingConfig(source=source, credit=CreditPolicy.CLAIMED)), 1.0)

    def test_achieved_credit_needs_confirmation(self):
        t = key_pickup_transition()
        confirmed = ShapingConfig(source=ClaimingSource({PICKUP: True, UNLOCK: False}))
        silent = ShapingConfig(source=ClaimingSource({}))
        self.assertEqual(shaped_reward(t, confirmed), 1.0)
        self.assertEqual(shaped_reward(t, silent), 0.0)


class ShapingConfigTest(SimpleTestCase):
    def test_invalid_configs(self):
        with self.assertRaises(ValueError):
            ShapingConfig(subgoal_bonus=-1.0)
        with self.assertRaises(ValueError):
            ShapingConfig(gamma=1.5)
        with self.assertRaises(ValueError):
            ShapingConfig(mode=ShapingMode.POTENTIAL, potential=None)
