import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from keyroom.domain import CellKind, Coord, GridLayout, GridState, decode_rows

logger = logging.getLogger(__name__)

WALKABLE = frozenset({CellKind.FLOOR, CellKind.STAIRS_UP, CellKind.STAIRS_DOWN})
NEIGHBOUR_DELTAS = ((0, -1), (1, 0), (0, 1), (-1, 0))


class LayoutError(ValueError):
    """Raised for room configurations or scenes that break the layout invariants."""


@dataclass(frozen=True)
class LayoutConfig:
    """
    Interior sizes (width, height) of the two rooms. The agent room sits on the
    left, the goal room on the right, and they share the wall holding the door.
    """
    agent_room: tuple = (4, 3)
    goal_room: tuple = (3, 3)
    max_width: int = 79
    max_height: int = 21

    @property
    def width(self) -> int:
        return self.agent_room[0] + self.goal_room[0] + 3

    @property
    def height(self) -> int:
        return max(self.agent_room[1], self.goal_room[1]) + 2

    def validate(self):
        for name, (w, h) in (("agent_room", self.agent_room), ("goal_room", self.goal_room)):
            if w < 2 or h < 2:
                raise LayoutError(f"{name} must be at least 2x2, got {w}x{h}")
        if self.max_width > 79 or self.max_height > 21:
            raise LayoutError("layout bounds cannot exceed the 79x21 gamescreen canvas")
        if self.width > self.max_width or self.height > self.max_height:
            raise LayoutError(
                f"rooms need {self.width}x{self.height} cells but only "
                f"{self.max_width}x{self.max_height} are available"
            )


DEFAULT_LAYOUT_CONFIG = LayoutConfig()


def generate_layout(seed: int, config: LayoutConfig = DEFAULT_LAYOUT_CONFIG) -> GridLayout:
    """
    Builds a two-room layout. Room sizes come from the config; the door row,
    key, agent, upstairs and goal positions are drawn from ``seed``.
    """
    config.validate()
    rng = np.random.default_rng(seed)
    (aw, ah), (gw, gh) = config.agent_room, config.goal_room
    width, height = config.width, config.height

    grid = [[CellKind.VOID] * width for _ in range(height)]
    horizontal = set()
    shared_x = aw + 1
    _draw_room(grid, horizontal, 0, 0, shared_x, ah + 1)
    _draw_room(grid, horizontal, shared_x, 0, shared_x + gw + 1, gh + 1)

    door_y = int(rng.integers(1, min(ah, gh) + 1))
    door_pos = (shared_x, door_y)
    grid[door_y][shared_x] = CellKind.DOOR_CLOSED
    horizontal.discard(door_pos)

    agent_side = [(x, y) for y in range(1, ah + 1) for x in range(1, aw + 1)]
    picks = rng.choice(len(agent_side), size=3, replace=False)
    key_spawn, agent_spawn, upstairs = (agent_side[int(i)] for i in picks)
    grid[upstairs[1]][upstairs[0]] = CellKind.STAIRS_UP

    goal_side = [(x, y) for y in range(1, gh + 1) for x in range(shared_x + 1, shared_x + gw + 1)]
    goal_pos = goal_side[int(rng.integers(len(goal_side)))]
    grid[goal_pos[1]][goal_pos[0]] = CellKind.STAIRS_DOWN

    layout = GridLayout(
        width=width,
        height=height,
        cells=tuple(tuple(row) for row in grid),
        door_pos=door_pos,
        key_spawn=key_spawn,
        goal_pos=goal_pos,
        agent_spawn=agent_spawn,
        horizontal_walls=frozenset(horizontal),
    )
    validate_layout(layout)
    return layout


def _draw_room(grid, horizontal, x0, y0, x1, y1):
    for y in range(y0, y1 + 1):
        for x in range(x0, x1 + 1):
            if y in (y0, y1):
                grid[y][x] = CellKind.WALL
                horizontal.add((x, y))
            elif x in (x0, x1):
                grid[y][x] = CellKind.WALL
            else:
                grid[y][x] = CellKind.FLOOR


def passable(layout: GridLayout, pos: Coord, door_locked: bool) -> bool:
    kind = layout.cell(pos)
    if kind.is_door:
        return not door_locked
    return kind in WALKABLE


def flood_fill(layout: GridLayout, start: Coord, door_locked: bool) -> set:
    seen = {start}
    queue = deque([start])
    while queue:
        x, y = queue.popleft()
        for dx, dy in NEIGHBOUR_DELTAS:
            nxt = (x + dx, y + dy)
            if nxt not in seen and passable(layout, nxt, door_locked):
                seen.add(nxt)
                queue.append(nxt)
    return seen


def validate_layout(layout: GridLayout):
    """Checks every GridLayout invariant; raises LayoutError on the first failure."""
    doors = layout.positions(CellKind.DOOR_CLOSED) + layout.positions(CellKind.DOOR_OPEN)
    if len(doors) != 1 or doors[0] != layout.door_pos:
        raise LayoutError(f"expected exactly one door at {layout.door_pos}, found {doors}")
    downstairs = layout.positions(CellKind.STAIRS_DOWN)
    if len(downstairs) != 1 or downstairs[0] != layout.goal_pos:
        raise LayoutError(f"expected exactly one '>' at {layout.goal_pos}, found {downstairs}")
    if len(layout.positions(CellKind.STAIRS_UP)) != 1:
        raise LayoutError("expected exactly one '<'")

    agent_side = flood_fill(layout, layout.agent_spawn, door_locked=True)
    if layout.key_spawn not in agent_side:
        raise LayoutError(f"key {layout.key_spawn} is not on the agent side of the door")
    if layout.goal_pos in agent_side:
        raise LayoutError("goal is reachable without opening the door")

    reachable = flood_fill(layout, layout.agent_spawn, door_locked=False)
    walkable = {
        (x, y)
        for y, row in enumerate(layout.cells)
        for x, kind in enumerate(row)
        if kind in WALKABLE or kind.is_door
    }
    unreachable = walkable - reachable
    if unreachable:
        raise LayoutError(f"cells unreachable with the door open: {sorted(unreachable)}")


def initial_state(layout: GridLayout) -> GridState:
    return GridState(
        layout=layout,
        agent_pos=layout.agent_spawn,
        key_on_floor=layout.key_spawn,
        key_held=False,
        door_locked=True,
    )


@dataclass(frozen=True)
class Scene:
    layout: GridLayout
    agent_pos: Coord
    key_pos: Optional[Coord]

    def state(self, *, key_held: bool = False, door_locked: bool = True,
              message: str = "", step_count: int = 0) -> GridState:
        return GridState(
            layout=self.layout,
            agent_pos=self.agent_pos,
            key_on_floor=None if key_held else self.key_pos,
            key_held=key_held,
            door_locked=door_locked,
            last_message=message,
            step_count=step_count,
        )


def parse_scene(rows, *, key_under_agent: bool = False, strict: bool = True) -> Scene:
    """
    Builds a layout from an ASCII scene using the renderer's glyphs, with '@'
    for the agent and '(' for the key (both standing on floor). Non-strict
    scenes may be partial views, e.g. without a door or a goal.
    """
    width = max(len(row) for row in rows)
    agent_pos = key_pos = None
    codes = []
    for y, row in enumerate(rows):
        line = []
        for x, glyph in enumerate(row.ljust(width)):
            if glyph == "@":
                agent_pos = (x, y)
                glyph = "."
            elif glyph == "(":
                key_pos = (x, y)
                glyph = "."
            line.append(glyph)
        codes.append("".join(line))
    if agent_pos is None:
        raise LayoutError("scene has no agent '@'")
    if key_under_agent:
        key_pos = agent_pos

    try:
        cells, horizontal = decode_rows(codes, width)
    except ValueError as exc:
        raise LayoutError(str(exc)) from exc

    layout = GridLayout(
        width=width,
        height=len(rows),
        cells=cells,
        door_pos=_single(cells, CellKind.DOOR_CLOSED) or _single(cells, CellKind.DOOR_OPEN),
        key_spawn=key_pos,
        goal_pos=_single(cells, CellKind.STAIRS_DOWN),
        agent_spawn=agent_pos,
        horizontal_walls=horizontal,
    )
    if strict:
        validate_layout(layout)
    else:
        logger.debug(f"[Layout] Parsed partial scene {layout.width}x{layout.height}")
    return Scene(layout=layout, agent_pos=agent_pos, key_pos=key_pos)


def _single(cells, kind: CellKind) -> Optional[Coord]:
    found = [(x, y) for y, row in enumerate(cells) for x, cell in enumerate(row) if cell is kind]
    return found[0] if found else None
