from pathlib import Path

from cli.services.command import HarnessCommand
from keyroom.domain import canonical_json
from promptkit.services.composer import compose, config_matrix, get_config


class Command(HarnessCommand):
    help = "Compose annotation prompts for dataset transitions."

    def add_command_arguments(self, parser):
        self.add_dataset_argument(parser)
        parser.add_argument("--config", dest="configs", action="append",
                            help="Prompt configuration, e.g. gamescreen-provided (repeatable)")
        parser.add_argument("--all-configs", dest="all_configs", action="store_true",
                            help="Every view x mode x separator x action configuration")
        parser.add_argument("--limit", type=int, help="Only the first N transitions")
        parser.add_argument("--out", help="Write JSONL records instead of printing the prompts")

    def run(self, config, out_dir, **options):
        manifest = self.load_dataset(config, options)
        if options["all_configs"]:
            specs = config_matrix()
        else:
            specs = [get_config(name) for name in options["configs"] or ["gamescreen-provided"]]
        transitions = manifest.transitions[: options["limit"]] if options["limit"] else manifest.transitions
        prompts = [compose(spec, t) for spec in specs for t in transitions]

        if not options["out"]:
            self.stdout.write("\n\n".join(p.text for p in prompts), ending="")
            return
        out = Path(options["out"])
        config.write_snapshot(out.parent)
        lines = [
            canonical_json({"transition_id": p.transition_id, "config_name": p.config_name,
                            "prompt_id": p.prompt_id, "prompt": p.text})
            for p in prompts
        ]
        self.write_file(out, "".join(line + "\n" for line in lines))
