from .renderer import default_origin, render, render_block, render_transition
