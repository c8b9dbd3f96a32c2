import csv
import io
import logging

from metrics.domain import MetricsRow

logger = logging.getLogger(__name__)

VARIANT_SUFFIXES = ("-nosep", "-action")
DELTA_COLUMN = "delta_f1_variant_minus_baseline"
DELTA_COLUMNS = ("annotator", "baseline_config", "variant_config", "baseline_f1", "variant_f1", DELTA_COLUMN)


class AblationError(ValueError):
    """Raised when baseline and variant results do not cover the same annotators."""


def base_config(name: str) -> str:
    for suffix in VARIANT_SUFFIXES:
        name = name.replace(suffix, "")
    return name


def _index(rows, label: str) -> dict:
    index = {}
    for row in rows:
        key = (row.annotator, base_config(row.config_name))
        if key in index:
            raise AblationError(f"{label}: {row.annotator} appears twice for {key[1]}")
        index[key] = row
    return index


def ablation_delta(baseline_rows, variant_rows) -> list:
    """
    F1 change per annotator and configuration, variant minus baseline. Rows are
    paired by annotator and by configuration name without its variant suffixes.
    """
    baseline = _index(baseline_rows, "baseline")
    variant = _index(variant_rows, "variant")
    if set(baseline) != set(variant):
        only_base = sorted(f"{a} ({c})" for a, c in set(baseline) - set(variant))
        only_variant = sorted(f"{a} ({c})" for a, c in set(variant) - set(baseline))
        raise AblationError(
            f"annotator sets differ; only in baseline: {only_base or '-'}; only in variant: {only_variant or '-'}"
        )

    deltas = []
    for key in sorted(baseline):
        base_row: MetricsRow = baseline[key]
        variant_row: MetricsRow = variant[key]
        deltas.append({
            "annotator": key[0],
            "baseline_config": base_row.config_name,
            "variant_config": variant_row.config_name,
            "baseline_f1": base_row.f1,
            "variant_f1": variant_row.f1,
            DELTA_COLUMN: variant_row.f1 - base_row.f1,
        })
    logger.info(f"[Ablation] {len(deltas)} paired rows")
    return deltas


def deltas_to_csv(deltas) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=DELTA_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for delta in deltas:
        writer.writerow({key: repr(value) if isinstance(value, float) else value for key, value in delta.items()})
    return buffer.getvalue()
