import sys
from pathlib import Path

from cli.services.command import HarnessCommand
from datasets.services.human_annotation import HumanAnnotationSession, parse_answer

REFERENCE_FILE = "reference.jsonl"
END_OF_INPUT = object()


class Command(HarnessCommand):
    help = (
        "Label dataset transitions by hand: each prompt is printed as is, then one "
        "y / n / s(kip) answer per canonical subgoal. A skip flags the transition as "
        "ambiguous. Answers are saved one by one and a rerun continues with the "
        "unlabelled transitions."
    )
    output_name = "reference"
    stealth_options = ("stdin",)

    def add_command_arguments(self, parser):
        self.add_dataset_argument(parser)
        parser.add_argument("--out", help=f"Reference file (default <out-dir>/{REFERENCE_FILE})")
        parser.add_argument("--annotator-id", dest="annotator_id", default="human")
        parser.add_argument("--config", dest="config_name", default="gamescreen-provided",
                            help="Prompt configuration shown to the annotator")
        parser.add_argument("--limit", type=int, help="Stop after N prompts")

    def run(self, config, out_dir, **options):
        manifest = self.load_dataset(config, options)
        path = Path(options["out"]) if options["out"] else out_dir / REFERENCE_FILE
        session = HumanAnnotationSession(manifest, path, options["annotator_id"], options["config_name"])
        stream = options.get("stdin") or sys.stdin
        pending = session.pending()
        if options["limit"]:
            pending = pending[: options["limit"]]

        labelled = flagged = 0
        for t in pending:
            self.stdout.write(session.prompt_text(t))
            answers = {}
            for name in session.subgoals:
                answer = self._ask(stream, f"{name}? [y/n/s] ")
                if answer is END_OF_INPUT:
                    self.stdout.write(self._progress(session, manifest.size, labelled, flagged, stopped=True))
                    return
                answers[name] = answer
                if answer is None:
                    break
            if session.record(t, answers):
                labelled += 1
            else:
                flagged += 1
        self.stdout.write(self._progress(session, manifest.size, labelled, flagged))

    def _ask(self, stream, question: str):
        while True:
            self.stdout.write(question, ending="")
            self.stdout.flush()
            line = stream.readline()
            if not line:
                return END_OF_INPUT
            try:
                return parse_answer(line)
            except ValueError:
                self.stdout.write("please answer y, n or s")

    @staticmethod
    def _progress(session, total: int, labelled: int, flagged: int, stopped: bool = False) -> str:
        done = total - len(session.pending())
        prefix = "stopped: " if stopped else ""
        return f"{prefix}{labelled} labelled, {flagged} flagged this session; {done} of {total} done -> {session.path}"
