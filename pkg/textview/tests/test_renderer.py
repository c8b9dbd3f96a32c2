from dataclasses import replace

from django.test import SimpleTestCase

from keyroom.domain import KEY_PICKUP_MESSAGE, Action
from keyroom.services.engine import step, transition
from keyroom.services.layout import generate_layout, initial_state
from keyroom.services.search import reachable_transitions
from keyroom.tests.scenes import MOVE_NORTH_ORIGIN, key_pickup_transition, move_north_transition
from textview.domain import ViewKind
from textview.services.renderer import STATUS_LINES, render, render_transition
from textview.tests.utils import read_crop


def stripped(lines):
    return [line.rstrip() for line in lines]


class CroppedRenderTest(SimpleTestCase):
    def test_published_crop(self):
        t = move_north_transition()
        obs = render(t.before, ViewKind.CROPPED, separator=True)

        self.assertEqual(stripped(obs.lines), [
            "",
            "      - - - -",
            "      | . . |",
            "      | . . |",
            "      - @ < |",
            "  . . . . . |",
            "| . ( . . . |",
            "- - - - - - -",
            "",
        ])
        self.assertEqual(obs.message, "Never mind.")
        self.assertFalse(obs.includes_stats)

    def test_row_widths(self):
        state = initial_state(generate_layout(0))
        with_spaces = render(state, ViewKind.CROPPED, separator=True)
        without = render(state, ViewKind.CROPPED, separator=False)

        self.assertEqual(len(with_spaces.lines), 9)
        self.assertEqual({len(line) for line in with_spaces.lines}, {17})
        self.assertEqual({len(line) for line in without.lines}, {9})
        self.assertEqual(with_spaces.lines[4][8], "@")
        self.assertEqual(without.lines[4][4], "@")

    def test_separator_off_glues_glyphs(self):
        layout = generate_layout(0)
        door_x, door_y = layout.door_pos
        state = replace(initial_state(layout), agent_pos=(door_x - 1, door_y))
        obs = render(state, ViewKind.CROPPED, separator=False)
        self.assertIn("@+", obs.lines[4])

    def test_door_glyph_follows_lock(self):
        layout = generate_layout(0)
        door_x, door_y = layout.door_pos
        state = replace(initial_state(layout), agent_pos=(door_x - 1, door_y), key_held=True, key_on_floor=None)
        unlocked, _, _ = step(state, Action.APPLY)
        self.assertIn("@+", render(state, ViewKind.CROPPED, separator=False).lines[4])
        self.assertIn("@|", render(unlocked, ViewKind.CROPPED, separator=False).lines[4])

    def test_key_glyph_only_while_on_floor(self):
        t = key_pickup_transition()
        before = render(t.before, ViewKind.CROPPED)
        after = render(t.after, ViewKind.CROPPED)
        # the agent hides the key it stands on, so neither render shows '('
        self.assertNotIn("(", before.text)
        self.assertNotIn("(", after.text)

        moved = move_north_transition()
        self.assertIn("(", render(moved.before, ViewKind.CROPPED).text)

    def test_render_is_deterministic(self):
        state = initial_state(generate_layout(9))
        self.assertEqual(render(state, ViewKind.GAMESCREEN), render(state, ViewKind.GAMESCREEN))

    def test_crop_reads_back_for_every_reachable_state(self):
        layout = generate_layout(0)
        for t in reachable_transitions(layout, limit=None):
            state = t.after
            obs = render(state, ViewKind.CROPPED, separator=True)
            ax, ay = state.agent_pos
            door_cell = (layout.door_pos[0] - ax + 4, layout.door_pos[1] - ay + 4)
            reading = read_crop(obs.lines, separator=True, door_cell=door_cell)

            self.assertEqual(reading.agent_cell, (4, 4))
            if state.key_on_floor is not None and state.key_on_floor != state.agent_pos:
                kx, ky = state.key_on_floor
                self.assertEqual(reading.key_cell, (kx - ax + 4, ky - ay + 4))
            else:
                self.assertIsNone(reading.key_cell)
            for glyph in reading.door_glyphs.values():
                if state.agent_pos != layout.door_pos:
                    self.assertEqual(glyph, "+" if state.door_locked else "|")


class GameScreenRenderTest(SimpleTestCase):
    def test_published_placement(self):
        t = move_north_transition()
        obs = render(t.before, ViewKind.GAMESCREEN, origin=MOVE_NORTH_ORIGIN)

        self.assertEqual(len(obs.lines), 24)
        self.assertEqual(obs.lines[0], "Never mind.".ljust(80))
        self.assertEqual(obs.lines[9].rstrip(), " " * 78 + "- - - -")
        self.assertEqual(obs.lines[15].rstrip(), " " * 72 + "- - - - - - -")
        self.assertEqual({len(line) for line in obs.grid_lines}, {159})
        self.assertEqual(obs.lines[-2:], tuple(line.ljust(80) for line in STATUS_LINES))

    def test_pickup_message_line(self):
        t = key_pickup_transition()
        obs = render(t.after, ViewKind.GAMESCREEN)
        self.assertEqual(obs.lines[0].rstrip(), KEY_PICKUP_MESSAGE)
        self.assertTrue(obs.includes_stats)

    def test_grid_is_twenty_one_rows_of_seventy_nine_map_columns(self):
        obs = render(initial_state(generate_layout(1)), ViewKind.GAMESCREEN, separator=False)
        self.assertEqual(len(obs.grid_lines), 21)
        # tty column 0 is blank, the map fills the other 79
        self.assertEqual({line[0] for line in obs.grid_lines}, {" "})
        self.assertEqual({len(line[1:]) for line in obs.grid_lines}, {79})
        self.assertEqual(sum(line.count("@") for line in obs.grid_lines), 1)

    def test_status_lines_constant(self):
        state = initial_state(generate_layout(2))
        later, _, _ = step(state, Action.GO_WEST)
        self.assertEqual(render(state, ViewKind.GAMESCREEN).lines[-2:], render(later, ViewKind.GAMESCREEN).lines[-2:])


class RenderTransitionTest(SimpleTestCase):
    def test_two_time_markers(self):
        text = render_transition(move_north_transition(), ViewKind.CROPPED)
        self.assertEqual(text.count("Time:"), 2)
        self.assertLess(text.index("Time: 0"), text.index("Time: 1"))
        self.assertNotIn("Action:", text)

    def test_action_line(self):
        text = render_transition(key_pickup_transition(), ViewKind.CROPPED, include_action=True)
        self.assertIn("Action: pickup\nTime: 1", text)

    def test_gamescreen_is_longer(self):
        t = transition(initial_state(generate_layout(0)), Action.GO_SOUTH)
        self.assertGreater(
            len(render_transition(t, ViewKind.GAMESCREEN)),
            len(render_transition(t, ViewKind.CROPPED)),
        )
