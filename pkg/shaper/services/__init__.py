# shaper/services/__init__.py
"""
Reward shaping from subgoal-termination signals:
- sources: oracle, cached verdict file, live backend
- shaping: additive and potential-based shaped rewards
- value_iteration: optimal values and action sets for a reward function
- q_learning: tabular learner, training jobs and learning curves
"""

from .sources import CachedVerdictSource, LiveBackendSource, MissingVerdictError, OracleSource
from .shaping import Shaper, shaped_reward
from .value_iteration import ValueIterationError, potential_reward, sparse_reward, value_iteration
from .q_learning import TrainingJob, curves_to_csv, q_learn, run_jobs, summarize_curves
