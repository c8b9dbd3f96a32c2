from pathlib import Path

from cli.services.command import HarnessCommand
from metrics.services.ablation import DELTA_COLUMN, ablation_delta, deltas_to_csv
from metrics.services.reports import display, parse_report_csv

DELTAS_CSV = "deltas.csv"


class Command(HarnessCommand):
    help = "F1 change per annotator between a baseline report and a prompt-variant report."
    output_name = "ablation"

    def add_command_arguments(self, parser):
        parser.add_argument("--base", required=True, help="Baseline report.csv")
        parser.add_argument("--variant", required=True, help="Variant report.csv (-nosep or -action configurations)")
        parser.add_argument("--base-config", dest="base_config", help="Only rows of this baseline configuration")
        parser.add_argument("--variant-config", dest="variant_config", help="Only rows of this variant configuration")

    def run(self, config, out_dir, **options):
        base = _read_rows(options["base"], options["base_config"])
        variant = _read_rows(options["variant"], options["variant_config"])
        deltas = ablation_delta(base, variant)
        self.write_file(out_dir / DELTAS_CSV, deltas_to_csv(deltas))
        for delta in deltas:
            sign = "+" if delta[DELTA_COLUMN] >= 0 else "-"
            self.stdout.write(
                f"{delta['annotator']}: {delta['baseline_config']} -> {delta['variant_config']} "
                f"{sign}{display(abs(delta[DELTA_COLUMN]))}"
            )


def _read_rows(path, config_name):
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"report not found: {path}")
    rows = parse_report_csv(path.read_text(encoding="utf-8"))
    if config_name:
        rows = [row for row in rows if row.config_name == config_name]
        if not rows:
            raise ValueError(f"{path.name} has no rows for configuration {config_name}")
    return rows
