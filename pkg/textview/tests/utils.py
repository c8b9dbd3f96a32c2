"""Inverse of the cropped renderer, used to check that renders keep what matters."""

from dataclasses import dataclass
from typing import Optional

from textview.services.renderer import CROP_SIZE


@dataclass
class CropReading:
    agent_cell: Optional[tuple]
    key_cell: Optional[tuple]
    door_glyphs: dict


def read_crop(rows, separator: bool = True, door_cell: Optional[tuple] = None) -> CropReading:
    """Returns crop-relative (column, row) cells for the agent and the key."""
    step = 2 if separator else 1
    grid = [[row[i] if i < len(row) else " " for i in range(0, CROP_SIZE * step, step)] for row in rows]
    agent = key = None
    for r, cells in enumerate(grid):
        for c, glyph in enumerate(cells):
            if glyph == "@":
                agent = (c, r)
            elif glyph == "(":
                key = (c, r)
    doors = {}
    if door_cell is not None:
        c, r = door_cell
        if 0 <= c < CROP_SIZE and 0 <= r < CROP_SIZE:
            doors[door_cell] = grid[r][c]
    return CropReading(agent_cell=agent, key_cell=key, door_glyphs=doors)
