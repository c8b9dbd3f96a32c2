from django.test import SimpleTestCase

from keyroom.domain import CellKind, GridLayout
from keyroom.services.layout import (
    LayoutConfig,
    LayoutError,
    flood_fill,
    generate_layout,
    initial_state,
    parse_scene,
    validate_layout,
)
from keyroom.tests.scenes import KEY_PICKUP_ROWS, MOVE_NORTH_ROWS


class GenerateLayoutTest(SimpleTestCase):
    def test_default_layout_has_one_of_each_landmark(self):
        """Seed 0 yields one door, one upstairs, one downstairs and a key spawn."""
        layout = generate_layout(0)

        self.assertEqual(len(layout.positions(CellKind.DOOR_CLOSED)), 1)
        self.assertEqual(len(layout.positions(CellKind.STAIRS_UP)), 1)
        self.assertEqual(layout.positions(CellKind.STAIRS_DOWN), [layout.goal_pos])
        self.assertEqual(layout.cell(layout.key_spawn), CellKind.FLOOR)
        self.assertNotEqual(layout.key_spawn, layout.agent_spawn)

    def test_same_seed_same_layout(self):
        self.assertEqual(generate_layout(3), generate_layout(3))
        self.assertEqual(generate_layout(3).to_rows(), generate_layout(3).to_rows())

    def test_different_seeds_move_something(self):
        a, b = generate_layout(0), generate_layout(1)
        self.assertNotEqual(
            (a.key_spawn, a.agent_spawn, a.door_pos),
            (b.key_spawn, b.agent_spawn, b.door_pos),
        )

    def test_goal_is_behind_the_door(self):
        """With the door locked the goal is cut off; once open everything connects."""
        for seed in range(20):
            layout = generate_layout(seed)
            self.assertNotIn(layout.goal_pos, flood_fill(layout, layout.agent_spawn, door_locked=True))
            self.assertIn(layout.goal_pos, flood_fill(layout, layout.agent_spawn, door_locked=False))

    def test_rooms_of_different_heights(self):
        layout = generate_layout(5, LayoutConfig(agent_room=(3, 5), goal_room=(4, 2)))
        self.assertEqual((layout.width, layout.height), (10, 7))
        validate_layout(layout)

    def test_rejects_rooms_below_two_by_two(self):
        with self.assertRaises(LayoutError):
            generate_layout(0, LayoutConfig(agent_room=(1, 3)))

    def test_rejects_rooms_that_do_not_fit(self):
        with self.assertRaises(LayoutError):
            generate_layout(0, LayoutConfig(agent_room=(60, 3), goal_room=(30, 3)))
        with self.assertRaises(LayoutError):
            generate_layout(0, LayoutConfig(agent_room=(4, 12), goal_room=(4, 3), max_height=10))

    def test_record_round_trip(self):
        layout = generate_layout(11)
        self.assertEqual(GridLayout.from_record(layout.to_record()), layout)
        self.assertEqual(GridLayout.from_record(layout.to_record()).fingerprint, layout.fingerprint)


class ParseSceneTest(SimpleTestCase):
    def test_partial_scene_keeps_wall_orientation(self):
        scene = parse_scene(MOVE_NORTH_ROWS, strict=False)

        self.assertEqual(scene.agent_pos, (4, 3))
        self.assertEqual(scene.key_pos, (2, 5))
        self.assertIsNone(scene.layout.door_pos)
        self.assertIn((3, 3), scene.layout.horizontal_walls)
        self.assertNotIn((6, 3), scene.layout.horizontal_walls)
        self.assertEqual(scene.layout.cell((0, 0)), CellKind.VOID)

    def test_key_under_agent(self):
        scene = parse_scene(KEY_PICKUP_ROWS, key_under_agent=True, strict=False)
        self.assertEqual(scene.key_pos, scene.agent_pos)
        self.assertEqual(scene.layout.door_pos, (4, 2))

    def test_strict_mode_enforces_invariants(self):
        with self.assertRaises(LayoutError):
            parse_scene(MOVE_NORTH_ROWS, strict=True)

    def test_strict_round_trip_of_generated_layout(self):
        layout = generate_layout(2)
        rows = [list(row) for row in layout.to_rows()]
        ax, ay = layout.agent_spawn
        kx, ky = layout.key_spawn
        rows[ay][ax] = "@"
        rows[ky][kx] = "("
        scene = parse_scene(["".join(row) for row in rows])
        self.assertEqual(scene.layout, layout)

    def test_scene_without_agent_is_rejected(self):
        with self.assertRaises(LayoutError):
            parse_scene(["|..|"], strict=False)

    def test_initial_state(self):
        layout = generate_layout(4)
        state = initial_state(layout)
        self.assertEqual(state.agent_pos, layout.agent_spawn)
        self.assertEqual(state.key_on_floor, layout.key_spawn)
        self.assertFalse(state.key_held)
        self.assertTrue(state.door_locked)
        self.assertEqual(state.step_count, 0)
