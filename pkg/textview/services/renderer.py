"""
Text observations in the two formats shown to annotators: the 9x9 crop
centred on the agent and the full 24-line terminal screen.
"""

import logging
from typing import Optional

from keyroom.domain import Coord, GridState, Transition
from textview.domain import DEFAULT_SYMBOLS, ObservationText, SymbolMap, ViewKind

logger = logging.getLogger(__name__)

CROP_SIZE = 9
SCREEN_ROWS = 21
SCREEN_COLS = 79
TTY_WIDTH = 80

STATUS_LINES = (
    "Agent the Footpad              St:14 Dx:17 Co:17 In:9 Wi:11 Ch:7 Chaotic S:0",
    "Dlvl:1 $:0 HP:12(12) Pw:2(2) AC:7 Xp:1/0",
)


def default_origin(state: GridState) -> Coord:
    """Map offset that centres the layout on the 79x21 canvas."""
    layout = state.layout
    return (max(0, (SCREEN_COLS - layout.width) // 2), max(0, (SCREEN_ROWS - layout.height) // 2))


def glyph_at(state: GridState, pos: Coord, symbols: SymbolMap = DEFAULT_SYMBOLS) -> str:
    if pos == state.agent_pos:
        return symbols.agent
    if state.key_on_floor is not None and pos == state.key_on_floor:
        return symbols.key
    layout = state.layout
    return symbols.cell_glyph(layout.cell(pos), pos in layout.horizontal_walls, state.door_locked)


def _join(cells, separator: bool) -> str:
    return (" " if separator else "").join(cells)


def render(
    state: GridState,
    view: ViewKind,
    separator: bool = True,
    *,
    origin: Optional[Coord] = None,
    symbols: SymbolMap = DEFAULT_SYMBOLS,
) -> ObservationText:
    view = ViewKind(view)
    if view is ViewKind.CROPPED:
        return _render_crop(state, separator, symbols)
    return _render_screen(state, separator, origin or default_origin(state), symbols)


def _render_crop(state: GridState, separator: bool, symbols: SymbolMap) -> ObservationText:
    ax, ay = state.agent_pos
    half = CROP_SIZE // 2
    rows = tuple(
        _join([glyph_at(state, (x, y), symbols) for x in range(ax - half, ax + half + 1)], separator)
        for y in range(ay - half, ay + half + 1)
    )
    return ObservationText(
        lines=rows,
        view=ViewKind.CROPPED,
        separator=separator,
        message=state.last_message,
        includes_stats=False,
    )


def _render_screen(state: GridState, separator: bool, origin: Coord, symbols: SymbolMap) -> ObservationText:
    ox, oy = origin
    rows = []
    for row in range(SCREEN_ROWS):
        # tty column 0 is never drawn; map column c sits at tty column c + 1
        cells = [symbols.void] + [
            glyph_at(state, (col - ox, row - oy), symbols) for col in range(SCREEN_COLS)
        ]
        rows.append(_join(cells, separator))
    lines = (state.last_message.ljust(TTY_WIDTH),) + tuple(rows) + tuple(
        line.ljust(TTY_WIDTH) for line in STATUS_LINES
    )
    return ObservationText(
        lines=lines,
        view=ViewKind.GAMESCREEN,
        separator=separator,
        message=state.last_message,
        includes_stats=True,
    )


def render_block(time: int, observation: ObservationText) -> str:
    if observation.view is ViewKind.CROPPED:
        header = f"Time: {time}\nCurrent message: {observation.message}\n\n"
    else:
        header = f"Time: {time}\n\n"
    return header + observation.text + "\n"


def render_transition(
    t: Transition,
    view: ViewKind,
    separator: bool = True,
    include_action: bool = False,
    *,
    origin: Optional[Coord] = None,
) -> str:
    """Time: 0 block, optional action line, Time: 1 block."""
    if origin is None and ViewKind(view) is ViewKind.GAMESCREEN:
        origin = default_origin(t.before)
    text = render_block(0, render(t.before, view, separator, origin=origin))
    if include_action:
        text += f"Action: {t.action.label}\n"
    return text + render_block(1, render(t.after, view, separator, origin=origin))
