from annotators.services.annotation_service import annotate_all, read_verdicts
from annotators.services.backends import OracleBackend
from cli.services.command import HarnessCommand
from datasets.domain import CategoryLabel
from datasets.services.ground_truth import reference_from_ground_truth
from datasets.services.storage import load_reference
from metrics.domain import PositivePolicy
from metrics.services.reports import render_tables, rows_to_csv, summary_json
from metrics.services.scoring import (
    predicted_category,
    score_groups,
    simulated_random_baseline,
    three_class_accuracy,
    three_class_confusion,
)
from metrics.services.size_groups import size_csv
from promptkit.services.composer import compose, get_config

REPORT_TEXT = "report.txt"
REPORT_CSV = "report.csv"
SUMMARY_JSON = "summary.json"
SIZES_CSV = "sizes.csv"


class Command(HarnessCommand):
    help = "Score annotator verdicts against reference labels and write the result tables."
    output_name = "report"

    def add_command_arguments(self, parser):
        self.add_dataset_argument(parser)
        parser.add_argument("--verdicts", action="append", default=[], help="Verdict JSONL file (repeatable)")
        parser.add_argument("--reference", help="Reference labels (default: environment ground truth)")
        parser.add_argument("--backend", choices=["oracle"], help="Annotate inline with the oracle")
        parser.add_argument("--config", dest="configs", action="append",
                            help="Configuration for inline annotation (repeatable, default gamescreen-provided)")
        parser.add_argument("--policy", choices=[p.value for p in PositivePolicy],
                            default=PositivePolicy.LEXICON_FILTERED.value)
        parser.add_argument("--group-by-size", dest="group_by_size", action="store_true",
                            help=f"Also write {SIZES_CSV} with F1 by model family and size")
        parser.add_argument("--no-baseline", dest="baseline", action="store_false")

    def run(self, config, out_dir, **options):
        manifest = self.load_dataset(config, options)
        if options["reference"]:
            reference = load_reference(options["reference"], manifest)
        else:
            self.stdout.write("no --reference given; scoring against environment ground truth")
            reference = reference_from_ground_truth(manifest)

        verdicts = []
        for path in options["verdicts"]:
            verdicts.extend(read_verdicts(path))
        if options["backend"] == "oracle":
            specs = [get_config(name) for name in options["configs"] or ["gamescreen-provided"]]
            inline, _ = annotate_all(OracleBackend(), [(compose(spec, t), t) for spec in specs for t in manifest.transitions])
            verdicts.extend(inline)
        if not verdicts:
            raise ValueError("nothing to evaluate: pass --verdicts or --backend oracle")

        policy = PositivePolicy(options["policy"])
        rows = score_groups(verdicts, reference, policy)

        categories = {t.id: CategoryLabel.from_event(t.event) for t in manifest.transitions}
        three_class = {}
        for (annotator, config_name), group in _groups(verdicts).items():
            matrix = three_class_confusion([categories[v.transition_id] for v in group],
                                           [predicted_category(v) for v in group])
            three_class[f"{annotator} / {config_name}"] = three_class_accuracy(matrix)

        tables = render_tables(rows, baseline=options["baseline"])
        self.write_file(out_dir / REPORT_TEXT, tables)
        self.write_file(out_dir / REPORT_CSV, rows_to_csv(rows))
        self.write_file(out_dir / SUMMARY_JSON, summary_json(
            rows,
            policy,
            dataset_size=manifest.size,
            reference="ground-truth" if not options["reference"] else str(options["reference"]),
            three_class_accuracy=three_class,
            simulated_random_baseline=simulated_random_baseline(categories.values(), seed=config["seed"]),
        ))
        if options["group_by_size"]:
            self.write_file(out_dir / SIZES_CSV, size_csv(rows))
        self.stdout.write(tables, ending="")


def _groups(verdicts) -> dict:
    groups = {}
    for verdict in verdicts:
        groups.setdefault((verdict.annotator, verdict.config_name), []).append(verdict)
    return dict(sorted(groups.items()))
