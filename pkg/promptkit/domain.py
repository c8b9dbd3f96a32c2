import hashlib
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from textview.domain import ViewKind


class SubgoalMode(Enum):
    PROVIDED = "provided"
    DISCOVER = "discover"


@dataclass(frozen=True)
class PromptSpec:
    name: str
    env_description: str
    symset: tuple  # ((glyph, bullet text), ...)
    task_description: str
    subgoal_mode: SubgoalMode
    view: ViewKind
    separator: bool
    include_action: bool
    output_format_request: str
    subgoals: tuple = ()
    role_text: Optional[str] = None
    main_config: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class PromptText:
    text: str
    spec: PromptSpec
    transition_id: str

    @property
    def prompt_id(self) -> str:
        return hashlib.sha256(self.text.encode("utf-8")).hexdigest()[:16]

    @property
    def config_name(self) -> str:
        return self.spec.name
