import json
from pathlib import Path

from django.test import SimpleTestCase

from metrics.domain import ConfusionCounts, MetricsRow, PositivePolicy
from metrics.services.reports import (
    CSV_COLUMNS,
    display,
    parse_report_csv,
    render_table,
    report,
    rows_to_csv,
    sort_rows,
    summary_json,
)
from metrics.services.scoring import metrics_row

PUBLISHED = json.loads((Path(__file__).parent / "fixtures" / "published_tables.json").read_text(encoding="utf-8"))


def published_rows(config):
    return [
        metrics_row(row["annotator"], row["config"], ConfusionCounts(row["tp"], row["tn"], row["fp"], row["fn"]))
        for row in PUBLISHED
        if row["config"] == config
    ]


class DisplayTest(SimpleTestCase):
    def test_half_even(self):
        self.assertEqual(display(0.625), "0.62")
        self.assertEqual(display(0.635), "0.64")
        self.assertEqual(display(1.0), "1.00")
        self.assertEqual(display(1 / 3), "0.33")


class SortRowsTest(SimpleTestCase):
    def row(self, annotator, f1, accuracy):
        return MetricsRow(annotator, "c", f1, accuracy, 0.0, 0.0, ConfusionCounts())

    def test_order(self):
        rows = [self.row("b", 0.5, 0.5), self.row("a", 0.5, 0.5), self.row("c", 0.5, 0.9), self.row("d", 0.9, 0.1)]
        self.assertEqual([r.annotator for r in sort_rows(rows)], ["d", "c", "a", "b"])


class RenderTableTest(SimpleTestCase):
    def test_gamescreen_provided_table(self):
        table = render_table(published_rows("gamescreen-provided"), title="gamescreen-provided")
        lines = table.splitlines()
        self.assertEqual(lines[0], "gamescreen-provided")
        self.assertTrue(lines[1].startswith("Annotator"))
        self.assertTrue(lines[3].startswith("Human"))
        self.assertTrue(lines[4].startswith("Mixtral-8x7B-Instruct-v0.1"))
        self.assertIn("0.74", lines[4])
        self.assertTrue(lines[-1].startswith("Random"))
        self.assertIn("0.33", lines[-1])
        self.assertEqual(len(lines), 2 + 1 + 8 + 1)

    def test_gemma_2b_accuracy_rounds_half_even(self):
        table = render_table(published_rows("cropped-provided-action"))
        line = next(line for line in table.splitlines() if line.startswith("gemma-1.1-2b-it"))
        self.assertEqual(line.split()[2], "0.62")

    def test_without_baseline(self):
        table = render_table(published_rows("gamescreen-provided"), baseline=False)
        self.assertNotIn("Random", table)

    def test_deterministic(self):
        rows = published_rows("cropped-discover")
        self.assertEqual(report(rows), report(list(reversed(rows))))


class CsvTest(SimpleTestCase):
    def test_header_and_full_precision(self):
        text = rows_to_csv(published_rows("gamescreen-provided"))
        header, first, *_ = text.splitlines()
        self.assertEqual(header.split(","), list(CSV_COLUMNS))
        self.assertNotIn("Random", text)
        self.assertTrue(first.startswith("Human,gamescreen-provided,1.0,"))

    def test_csv_reads_back(self):
        rows = published_rows("gamescreen-provided-nosep")
        self.assertEqual(parse_report_csv(rows_to_csv(rows)), sort_rows(rows))

    def test_summary_json(self):
        data = json.loads(summary_json(published_rows("gamescreen-provided"), PositivePolicy.LEXICON_FILTERED, size=256))
        self.assertEqual(data["policy"], "lexicon-filtered")
        self.assertEqual(data["size"], 256)
        self.assertEqual(data["rows"][1]["annotator"], "Mixtral-8x7B-Instruct-v0.1")
        self.assertEqual(data["rows"][1]["tp"], 124)
