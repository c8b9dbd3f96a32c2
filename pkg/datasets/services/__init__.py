# datasets/services/__init__.py
"""
Evaluation datasets:
- collector: balanced random-policy collection and single-layout enumeration
- storage: dataset and reference-label files
- ground_truth: machine reference labels
- human_annotation: resumable terminal annotation sessions
"""

from .collector import DatasetCollectionError, category_targets, collect_balanced, collect_layout
from .storage import DatasetLoadError, load_manifest, load_reference, save_manifest, save_reference
from .ground_truth import ground_truth_flags, reference_from_ground_truth
from .human_annotation import HumanAnnotationSession, parse_answer
