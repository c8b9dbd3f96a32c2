import itertools
import logging
from typing import Optional

from keyroom.domain import CANONICAL_SUBGOALS, Coord, Transition
from promptkit.domain import PromptSpec, PromptText, SubgoalMode
from promptkit.services import templates
from textview.domain import DEFAULT_SYMBOLS, ViewKind
from textview.services.renderer import render_transition

logger = logging.getLogger(__name__)

# Glyphs the symset must describe; the agent and blank cells are left implicit.
DESCRIBED_GLYPHS = DEFAULT_SYMBOLS.glyphs() - {DEFAULT_SYMBOLS.agent, DEFAULT_SYMBOLS.void}


class PromptSpecError(ValueError):
    """Raised for prompt configurations that cannot be composed."""


def build_spec(
    view: ViewKind,
    mode: SubgoalMode,
    separator: bool = True,
    include_action: bool = False,
    *,
    subgoals: tuple = CANONICAL_SUBGOALS,
    role_text: Optional[str] = None,
) -> PromptSpec:
    name = f"{view.value}-{mode.value}"
    if not separator:
        name += "-nosep"
    if include_action:
        name += "-action"
    return PromptSpec(
        name=name,
        role_text=role_text,
        env_description=templates.ENV_DESCRIPTION,
        symset=templates.SYMSET,
        task_description=templates.TASK_DESCRIPTION,
        subgoal_mode=mode,
        subgoals=tuple(subgoals) if mode is SubgoalMode.PROVIDED else (),
        view=view,
        separator=separator,
        include_action=include_action,
        output_format_request=templates.OUTPUT_FORMAT_REQUEST,
        main_config=separator and not include_action,
    )


def config_matrix() -> list:
    """All 16 view x subgoal-mode x separator x action configurations."""
    return [
        build_spec(view, mode, separator, include_action)
        for view, mode, separator, include_action in itertools.product(
            (ViewKind.GAMESCREEN, ViewKind.CROPPED),
            (SubgoalMode.PROVIDED, SubgoalMode.DISCOVER),
            (True, False),
            (False, True),
        )
    ]


def get_config(name: str) -> PromptSpec:
    for spec in config_matrix():
        if spec.name == name:
            return spec
    known = ", ".join(spec.name for spec in config_matrix())
    raise PromptSpecError(f"Unknown prompt configuration '{name}'. Known: {known}")


def validate_spec(spec: PromptSpec):
    if spec.subgoal_mode is SubgoalMode.PROVIDED and not spec.subgoals:
        raise PromptSpecError(f"{spec.name}: provided mode needs at least one subgoal")
    if spec.subgoal_mode is SubgoalMode.DISCOVER and spec.subgoals:
        raise PromptSpecError(f"{spec.name}: discover mode cannot carry a subgoal list")
    missing = DESCRIBED_GLYPHS - {glyph for glyph, _ in spec.symset}
    if missing:
        raise PromptSpecError(f"{spec.name}: symset does not describe {sorted(missing)}")


def _subgoal_section(spec: PromptSpec) -> str:
    if spec.subgoal_mode is SubgoalMode.DISCOVER:
        return templates.DISCOVER_INSTRUCTION + "\n"
    entries = "".join(f'    "{name}": None,\n' for name in spec.subgoals)
    return f"{templates.PROVIDED_HEADER}\n```python\nsubgoals = {{\n{entries}}} \n``` \n"


def compose(spec: PromptSpec, t: Transition, *, origin: Optional[Coord] = None) -> PromptText:
    """Renders the single-turn prompt asking whether a subgoal is achieved at Time: 1."""
    validate_spec(spec)
    parts = []
    if spec.role_text:
        parts.append(f"{spec.role_text}\n\n")
    parts.append(f"{spec.env_description}\n\n")
    parts.append(templates.SYMSET_INTRO + "\n")
    parts.extend(f"- {text}\n" for _, text in spec.symset)
    parts.append(f"\n{spec.task_description}\n\n")
    parts.append(_subgoal_section(spec))
    parts.append(templates.VERIFICATION_INSTRUCTION + "\n\n\n")
    parts.append(spec.output_format_request + "\n\n")
    parts.append(f"{templates.OBSERVATION_HEADER}\n\n<gameplay>\n")
    parts.append(render_transition(t, spec.view, spec.separator, spec.include_action, origin=origin))
    parts.append("\n</gameplay>\n\n")
    parts.append(templates.CLOSING_NOTICE)
    return PromptText(text="".join(parts), spec=spec, transition_id=t.id)
