# keyroom/services/__init__.py
"""
Key-door room simulation:
- layout: room generation, scene parsing and layout invariants
- engine: step semantics and subgoal event detection
- search: breadth-first enumeration and shortest plans
"""

from .layout import LayoutConfig, LayoutError, generate_layout, initial_state, parse_scene
from .engine import EnvironmentContractError, detect_event, step, transition
from .search import enumerate_transitions, reachable_transitions, solve
