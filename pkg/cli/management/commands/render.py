from cli.services.command import HarnessCommand
from keyroom.services.layout import generate_layout, initial_state
from textview.domain import ViewKind
from textview.services.renderer import render, render_transition


class Command(HarnessCommand):
    help = "Print the text observation of a dataset transition, or of a fresh layout."

    def add_command_arguments(self, parser):
        self.add_dataset_argument(parser)
        parser.add_argument("--id", dest="transition_id", help="Transition id (default: the first one)")
        parser.add_argument("--index", type=int, help="Transition position in the dataset")
        parser.add_argument("--layout-seed", dest="layout_seed", type=int,
                            help="Render the start state of this layout instead of a transition")
        parser.add_argument("--view", choices=[v.value for v in ViewKind], default=ViewKind.GAMESCREEN.value)
        parser.add_argument("--no-separator", dest="separator", action="store_false")
        parser.add_argument("--action", dest="include_action", action="store_true", help="Show the action line")

    def run(self, config, out_dir, **options):
        view = ViewKind(options["view"])
        if options["layout_seed"] is not None:
            state = initial_state(generate_layout(options["layout_seed"]))
            self.stdout.write(render(state, view, options["separator"]).text)
            return
        manifest = self.load_dataset(config, options)
        if options["transition_id"]:
            t = manifest.by_id().get(options["transition_id"])
            if t is None:
                raise KeyError(f"transition {options['transition_id']} is not in the dataset")
        elif options["index"] is not None:
            if not 0 <= options["index"] < manifest.size:
                raise ValueError(f"--index must lie in [0, {manifest.size})")
            t = manifest.transitions[options["index"]]
        else:
            t = manifest.transitions[0]
        self.stdout.write(render_transition(t, view, options["separator"], options["include_action"]), ending="")
