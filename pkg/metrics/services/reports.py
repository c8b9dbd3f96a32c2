"""
Result tables. Values stay at full precision everywhere except the
plain-text table, which rounds half-even to two decimals.
"""

import csv
import io
import json
from decimal import ROUND_HALF_EVEN, Decimal
from typing import Optional

from metrics.domain import RANDOM_BASELINE, RANDOM_BASELINE_NAME, ConfusionCounts, MetricsRow, PositivePolicy

METRIC_COLUMNS = ("f1", "accuracy", "precision", "recall")
COUNT_COLUMNS = ("tp", "tn", "fp", "fn")
CSV_COLUMNS = ("annotator", "config") + METRIC_COLUMNS + COUNT_COLUMNS + ("unparseable",)
TABLE_HEADERS = ("Annotator", "F1", "Accuracy", "Precision", "Recall", "TP", "TN", "FP", "FN")


def display(value: float) -> str:
    return str(Decimal(str(value)).quantize(Decimal("0.01"), rounding=ROUND_HALF_EVEN))


def sort_rows(rows) -> list:
    """F1 descending, then accuracy descending, then annotator name."""
    return sorted(rows, key=lambda row: (-row.f1, -row.accuracy, row.annotator))


def config_order(rows) -> list:
    """Grouped by configuration, then in table order."""
    return sorted(rows, key=lambda row: (row.config_name, -row.f1, -row.accuracy, row.annotator))


def render_table(rows, *, title: Optional[str] = None, baseline: bool = True) -> str:
    cells = [TABLE_HEADERS]
    for row in sort_rows(rows):
        cells.append(
            (row.annotator,)
            + tuple(display(getattr(row, name)) for name in METRIC_COLUMNS)
            + tuple(str(getattr(row.counts, name)) for name in COUNT_COLUMNS)
        )
    if baseline:
        cells.append((RANDOM_BASELINE_NAME,) + (display(RANDOM_BASELINE),) * 4 + ("-",) * 4)

    widths = [max(len(line[i]) for line in cells) for i in range(len(TABLE_HEADERS))]
    out = []
    if title:
        out.append(title)
    for n, line in enumerate(cells):
        out.append("  ".join(
            text.ljust(widths[i]) if i == 0 else text.rjust(widths[i]) for i, text in enumerate(line)
        ).rstrip())
        if n == 0:
            out.append("  ".join("-" * width for width in widths))
    return "\n".join(out) + "\n"


def render_tables(rows, *, baseline: bool = True) -> str:
    """One table per configuration, titled with its name."""
    groups = {}
    for row in rows:
        groups.setdefault(row.config_name, []).append(row)
    return "\n".join(render_table(group, title=name, baseline=baseline) for name, group in sorted(groups.items()))


def rows_to_csv(rows) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in config_order(rows):
        writer.writerow(
            [row.annotator, row.config_name]
            + [repr(getattr(row, name)) for name in METRIC_COLUMNS]
            + [getattr(row.counts, name) for name in COUNT_COLUMNS]
            + [row.unparseable]
        )
    return buffer.getvalue()


def parse_report_csv(text: str) -> list:
    rows = []
    for record in csv.DictReader(io.StringIO(text)):
        rows.append(MetricsRow(
            annotator=record["annotator"],
            config_name=record["config"],
            counts=ConfusionCounts(**{name: int(record[name]) for name in COUNT_COLUMNS}),
            unparseable=int(record.get("unparseable") or 0),
            **{name: float(record[name]) for name in METRIC_COLUMNS},
        ))
    return rows


def summary(rows, policy: PositivePolicy, **extra) -> dict:
    """Machine-readable run summary."""
    return {
        "policy": policy.value,
        "baseline": {RANDOM_BASELINE_NAME: RANDOM_BASELINE},
        "rows": [
            {
                "annotator": row.annotator,
                "config": row.config_name,
                **{name: getattr(row, name) for name in METRIC_COLUMNS},
                **{name: getattr(row.counts, name) for name in COUNT_COLUMNS},
                "unparseable": row.unparseable,
            }
            for row in config_order(rows)
        ],
        **extra,
    }


def summary_json(rows, policy: PositivePolicy, **extra) -> str:
    return json.dumps(summary(rows, policy, **extra), indent=2, sort_keys=True) + "\n"


def report(rows, *, title: Optional[str] = None, baseline: bool = True) -> tuple:
    """Returns ``(table text, csv text)``; the baseline row only appears in the table."""
    return render_table(rows, title=title, baseline=baseline), rows_to_csv(rows)
