# metrics/services/__init__.py
"""
Scoring and reporting:
- scoring: confusion counts, metric formulas, 3-class helpers, simulated baseline
- reports: sorted tables, CSV and JSON outputs
- ablation: F1 deltas between prompt variants
- size_groups: F1 by model family and parameter count
"""

from .scoring import ScoringError, derive, metrics_row, score, score_groups
from .reports import parse_report_csv, report, rows_to_csv, summary_json
from .ablation import AblationError, ablation_delta, deltas_to_csv
from .size_groups import size_csv
