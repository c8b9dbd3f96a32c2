"""
Domain values for the two-room key-door gridworld.

Coordinates are ``(x, y)`` pairs: ``x`` is the column, ``y`` the row, with the
origin at the top-left corner of the layout.
"""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from functools import cached_property
from typing import Optional

Coord = tuple[int, int]

KEY_PICKUP_MESSAGE = "g - a key named The Master Key of Thievery."
WALL_MESSAGE = "It's a wall."
NOTHING_HERE_MESSAGE = "There is nothing here to pick up."
NEVER_MIND_MESSAGE = "Never mind."

MESSAGES = ("", WALL_MESSAGE, KEY_PICKUP_MESSAGE, NOTHING_HERE_MESSAGE, NEVER_MIND_MESSAGE)


def canonical_json(payload) -> str:
    """Stable JSON text used for hashing and for every persisted record."""
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


class CellKind(Enum):
    FLOOR = "floor"
    WALL = "wall"
    DOOR_CLOSED = "door_closed"
    DOOR_OPEN = "door_open"
    STAIRS_UP = "stairs_up"
    STAIRS_DOWN = "stairs_down"
    VOID = "void"

    @property
    def is_door(self) -> bool:
        return self in (CellKind.DOOR_CLOSED, CellKind.DOOR_OPEN)


# Scene codes shared by the layout record format and parse_scene.
# '-' and '|' are both walls; the code keeps the drawn orientation.
CELL_CODES = {
    ".": CellKind.FLOOR,
    "-": CellKind.WALL,
    "|": CellKind.WALL,
    "+": CellKind.DOOR_CLOSED,
    "/": CellKind.DOOR_OPEN,
    "<": CellKind.STAIRS_UP,
    ">": CellKind.STAIRS_DOWN,
    " ": CellKind.VOID,
}


class Action(IntEnum):
    GO_NORTH = 0
    GO_EAST = 1
    GO_SOUTH = 2
    GO_WEST = 3
    PICKUP = 4
    APPLY = 5

    @property
    def label(self) -> str:
        return _ACTION_LABELS[self]

    @property
    def delta(self) -> Optional[Coord]:
        return _ACTION_DELTAS.get(self)

    @classmethod
    def from_label(cls, label: str) -> "Action":
        for action, text in _ACTION_LABELS.items():
            if text == label:
                return action
        raise ValueError(f"Unknown action label: {label!r}")


_ACTION_LABELS = {
    Action.GO_NORTH: "go north",
    Action.GO_EAST: "go east",
    Action.GO_SOUTH: "go south",
    Action.GO_WEST: "go west",
    Action.PICKUP: "pickup",
    Action.APPLY: "apply",
}

_ACTION_DELTAS = {
    Action.GO_NORTH: (0, -1),
    Action.GO_EAST: (1, 0),
    Action.GO_SOUTH: (0, 1),
    Action.GO_WEST: (-1, 0),
}


class SubgoalEvent(Enum):
    NONE = "none"
    KEY_PICKED_UP = "pick up the key"
    DOOR_UNLOCKED = "open the door"

    @property
    def canonical_name(self) -> str:
        return self.value


CANONICAL_SUBGOALS = (
    SubgoalEvent.KEY_PICKED_UP.canonical_name,
    SubgoalEvent.DOOR_UNLOCKED.canonical_name,
)


@dataclass(frozen=True)
class GridLayout:
    width: int
    height: int
    cells: tuple  # cells[y][x] -> CellKind
    door_pos: Optional[Coord]
    key_spawn: Optional[Coord]
    goal_pos: Optional[Coord]
    agent_spawn: Coord
    horizontal_walls: frozenset = field(default_factory=frozenset)

    def cell(self, pos: Coord) -> CellKind:
        x, y = pos
        if 0 <= x < self.width and 0 <= y < self.height:
            return self.cells[y][x]
        return CellKind.VOID

    def positions(self, kind: CellKind) -> list:
        return [
            (x, y)
            for y, row in enumerate(self.cells)
            for x, cell in enumerate(row)
            if cell is kind
        ]

    def to_rows(self) -> list:
        rows = []
        for y, row in enumerate(self.cells):
            codes = []
            for x, cell in enumerate(row):
                if cell is CellKind.WALL:
                    codes.append("-" if (x, y) in self.horizontal_walls else "|")
                else:
                    codes.append(_KIND_CODES[cell])
            rows.append("".join(codes))
        return rows

    def to_record(self) -> dict:
        return {
            "width": self.width,
            "height": self.height,
            "rows": self.to_rows(),
            "door_pos": _coord_out(self.door_pos),
            "key_spawn": _coord_out(self.key_spawn),
            "goal_pos": _coord_out(self.goal_pos),
            "agent_spawn": _coord_out(self.agent_spawn),
        }

    @classmethod
    def from_record(cls, record: dict) -> "GridLayout":
        cells, horizontal = decode_rows(record["rows"], record["width"])
        return cls(
            width=record["width"],
            height=record["height"],
            cells=cells,
            door_pos=_coord_in(record.get("door_pos")),
            key_spawn=_coord_in(record.get("key_spawn")),
            goal_pos=_coord_in(record.get("goal_pos")),
            agent_spawn=_coord_in(record["agent_spawn"]),
            horizontal_walls=horizontal,
        )

    @cached_property
    def fingerprint(self) -> str:
        return hashlib.sha256(canonical_json(self.to_record()).encode("utf-8")).hexdigest()[:16]


_KIND_CODES = {kind: code for code, kind in CELL_CODES.items() if kind is not CellKind.WALL}


def decode_rows(rows, width: int) -> tuple:
    """Turns scene code rows into a cell grid plus the set of horizontal walls."""
    cells = []
    horizontal = set()
    for y, text in enumerate(rows):
        text = text.ljust(width)
        row = []
        for x, code in enumerate(text[:width]):
            if code not in CELL_CODES:
                raise ValueError(f"Unknown cell code {code!r} at ({x}, {y})")
            if code == "-":
                horizontal.add((x, y))
            row.append(CELL_CODES[code])
        cells.append(tuple(row))
    return tuple(cells), frozenset(horizontal)


def _coord_out(pos: Optional[Coord]):
    return None if pos is None else [pos[0], pos[1]]


def _coord_in(value) -> Optional[Coord]:
    return None if value is None else (int(value[0]), int(value[1]))


@dataclass(frozen=True)
class GridState:
    layout: GridLayout = field(compare=False, repr=False)
    agent_pos: Coord
    key_on_floor: Optional[Coord]
    key_held: bool
    door_locked: bool
    last_message: str = ""
    step_count: int = 0
    terminated: bool = False

    @property
    def signature(self) -> tuple:
        """Q-table key. step_count and the message are left out on purpose."""
        return (self.agent_pos, self.key_held, self.door_locked)

    def identity_record(self) -> dict:
        return {
            "agent_pos": _coord_out(self.agent_pos),
            "key_on_floor": _coord_out(self.key_on_floor),
            "key_held": self.key_held,
            "door_locked": self.door_locked,
            "last_message": self.last_message,
            "terminated": self.terminated,
        }

    def to_record(self) -> dict:
        record = self.identity_record()
        record["step_count"] = self.step_count
        return record

    @classmethod
    def from_record(cls, layout: GridLayout, record: dict) -> "GridState":
        return cls(
            layout=layout,
            agent_pos=_coord_in(record["agent_pos"]),
            key_on_floor=_coord_in(record.get("key_on_floor")),
            key_held=bool(record["key_held"]),
            door_locked=bool(record["door_locked"]),
            last_message=record.get("last_message", ""),
            step_count=int(record.get("step_count", 0)),
            terminated=bool(record.get("terminated", False)),
        )


@dataclass(frozen=True)
class Transition:
    before: GridState
    action: Action
    after: GridState
    task_reward: int
    event: SubgoalEvent

    @cached_property
    def id(self) -> str:
        # step_count is excluded so the same situation always hashes to the same id.
        payload = {
            "layout": self.before.layout.fingerprint,
            "state": self.before.identity_record(),
            "action": int(self.action),
        }
        return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()[:20]

    @property
    def layout(self) -> GridLayout:
        return self.before.layout


def canonical_flags(event: SubgoalEvent) -> dict:
    """Canonical subgoal flags implied by an event: true exactly for the achieved one."""
    return {name: name == event.canonical_name for name in CANONICAL_SUBGOALS}
