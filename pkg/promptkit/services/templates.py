# promptkit/services/templates.py
# Literal prompt sections. Trailing spaces are part of the published wording.

ENV_DESCRIPTION = "The environment is MiniHack."

SYMSET_INTRO = (
    "I will present you with a short extract of a gameplay. "
    "At each timestep, symbols represent the following items:"
)

SYMSET = (
    (".", '"." represents a floor tile.'),
    ("|", '"|" can represent either a wall, a vertical wall, an open door.'),
    ("-", '"-" can represent either the bottom left corner (of a room), bottom right corner (of a room), '
          'wall, horizontal wall, wall, top left corner (of a room), op right corner (of a room).'),
    ("+", '"+" represents a closed door. Doors can be locked, and require a key to open.'),
    ("(", '"(" represents a useful item (pick-axe, key, lamp...)'),
    ("<", '"<" represents a ladder or staircase up.'),
    (">", '">" represents a ladder or staircase down.'),
)

TASK_DESCRIPTION = "The task of the agent is to win the game."

PROVIDED_HEADER = "Consider the following subgoals:"

DISCOVER_INSTRUCTION = "First, based on your knowledge of NetHack, break down the task of the agent into subgoals. "

VERIFICATION_INSTRUCTION = (
    "Then, consider the following game transition, which might or might not contain these subgoals.\n"
    "Determine if any of the subgoals is achieved at Time: 1 or not."
)

OUTPUT_FORMAT_REQUEST = (
    "Report your response in a dictionary containing the name of the subgoals as keys and booleans as value. "
    "For example:\n"
    "```python\n"
    "{\n"
    "    <name of goal>: <bool>,\n"
    "} "
)

OBSERVATION_HEADER = "Observation Sequence:"

CLOSING_NOTICE = (
    "I will not consider anything that is not in the dictionary.\n"
    "You have only one shot at this, and you cannot ask for clarifications."
)
