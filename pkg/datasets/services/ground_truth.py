from datasets.domain import DatasetManifest, ReferenceLabel, ReferenceLabels
from keyroom.domain import Transition, canonical_flags

GROUND_TRUTH_ANNOTATOR = "ground-truth"


def ground_truth_flags(t: Transition) -> dict:
    """Canonical flags implied by the recorded event; stands in for a human reference."""
    return canonical_flags(t.event)


def reference_from_ground_truth(manifest: DatasetManifest, annotator_id: str = GROUND_TRUTH_ANNOTATOR) -> ReferenceLabels:
    return ReferenceLabels(labels={
        t.id: ReferenceLabel(flags=ground_truth_flags(t), annotator_id=annotator_id)
        for t in manifest.transitions
    })
