from cli.services.command import DATASET_FILE, HarnessCommand
from datasets.services.collector import DEFAULT_MAX_ROLLOUTS, DEFAULT_STEP_CAP, collect_balanced, collect_layout
from datasets.services.storage import save_manifest


class Command(HarnessCommand):
    help = "Collect a category-balanced transition dataset, or every transition of one layout."
    output_name = "dataset"

    def add_command_arguments(self, parser):
        parser.add_argument("--size", type=int, default=256, help="Number of transitions (default 256)")
        parser.add_argument("--max-rollouts", dest="max_rollouts", type=int, default=DEFAULT_MAX_ROLLOUTS)
        parser.add_argument("--step-cap", dest="step_cap", type=int, default=DEFAULT_STEP_CAP)
        parser.add_argument("--no-assist", dest="assisted", action="store_false",
                            help="Only plain random episodes, no scripted prefixes")
        parser.add_argument("--enumerate-layout", dest="enumerate_layout", type=int, metavar="SEED",
                            help="Write every transition of the layout built from SEED instead")
        parser.add_argument("--created-at", dest="created_at", help="Timestamp recorded in the header")

    def run(self, config, out_dir, **options):
        if options["enumerate_layout"] is not None:
            manifest = collect_layout(options["enumerate_layout"], created_at=options["created_at"])
        else:
            manifest = collect_balanced(
                config["seed"],
                options["size"],
                options["max_rollouts"],
                step_cap=options["step_cap"],
                assisted=options["assisted"],
                created_at=options["created_at"],
            )
        path = out_dir / DATASET_FILE
        save_manifest(manifest, path)
        counts = ", ".join(f"{category.key}={n}" for category, n in manifest.counts.items())
        self.stdout.write(f"{manifest.size} transitions ({counts}) -> {path}")
