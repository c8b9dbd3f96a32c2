from dataclasses import dataclass
from enum import Enum

from keyroom.domain import CellKind


class ViewKind(Enum):
    CROPPED = "cropped"
    GAMESCREEN = "gamescreen"


@dataclass(frozen=True)
class SymbolMap:
    floor: str = "."
    vertical_wall: str = "|"
    horizontal_wall: str = "-"
    door_closed: str = "+"
    door_open: str = "|"
    key: str = "("
    stairs_up: str = "<"
    stairs_down: str = ">"
    agent: str = "@"
    void: str = " "

    def cell_glyph(self, kind: CellKind, horizontal: bool, door_locked: bool) -> str:
        if kind is CellKind.WALL:
            return self.horizontal_wall if horizontal else self.vertical_wall
        if kind.is_door:
            return self.door_closed if door_locked else self.door_open
        return {
            CellKind.FLOOR: self.floor,
            CellKind.STAIRS_UP: self.stairs_up,
            CellKind.STAIRS_DOWN: self.stairs_down,
            CellKind.VOID: self.void,
        }[kind]

    def glyphs(self) -> frozenset:
        return frozenset(
            (self.floor, self.vertical_wall, self.horizontal_wall, self.door_closed, self.door_open,
             self.key, self.stairs_up, self.stairs_down, self.agent, self.void)
        )


DEFAULT_SYMBOLS = SymbolMap()


@dataclass(frozen=True)
class ObservationText:
    """
    One rendered observation. For the gamescreen, ``lines`` holds the message
    line, the 21 map rows and the two status lines; for the crop only the 9 rows.
    """
    lines: tuple
    view: ViewKind
    separator: bool
    message: str
    includes_stats: bool

    @property
    def grid_lines(self) -> tuple:
        if self.view is ViewKind.GAMESCREEN:
            return self.lines[1:-2]
        return self.lines

    @property
    def text(self) -> str:
        return "\n".join(self.lines)
