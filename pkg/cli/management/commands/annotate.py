import json
from pathlib import Path

from django.core.management.base import CommandError

from annotators.services.annotation_service import VerdictWriter, annotate_all, recorded_keys
from annotators.services.response_cache import CachingBackend
from cli.services.backend_factory import LLM_KEYS, add_backend_arguments, build_backend
from cli.services.command import HarnessCommand
from promptkit.services.composer import compose, config_matrix, get_config

VERDICTS_FILE = "verdicts.jsonl"
COST_FILE = "cost.json"


class Command(HarnessCommand):
    help = "Ask an annotator backend about every dataset transition and append its verdicts."
    output_name = "annotations"
    config_keys = LLM_KEYS

    def add_command_arguments(self, parser):
        self.add_dataset_argument(parser)
        parser.add_argument("--config", dest="configs", action="append",
                            help="Prompt configuration (repeatable, default gamescreen-provided)")
        parser.add_argument("--main-configs", dest="main_configs", action="store_true",
                            help="The four view x subgoal-mode configurations")
        parser.add_argument("--all-configs", dest="all_configs", action="store_true")
        parser.add_argument("--limit", type=int, help="Only the first N transitions")
        parser.add_argument("--parallel", type=int, help="Concurrent requests (CALM_PARALLEL)")
        parser.add_argument("--out", help=f"Verdict file (default <out-dir>/{VERDICTS_FILE}); existing prompts are skipped")
        parser.add_argument("--no-cache", dest="use_cache", action="store_false",
                            help="Do not read or fill the response cache")
        add_backend_arguments(parser)

    def run(self, config, out_dir, **options):
        manifest = self.load_dataset(config, options)
        if options["all_configs"]:
            specs = config_matrix()
        elif options["main_configs"]:
            specs = [spec for spec in config_matrix() if spec.main_config]
        else:
            specs = [get_config(name) for name in options["configs"] or ["gamescreen-provided"]]

        backend = build_backend(options["backend"], config, options)
        if options["backend"] in ("http", "gemini") and options["use_cache"]:
            self.ensure_cache_table()
            backend = CachingBackend(backend)

        transitions = manifest.transitions[: options["limit"]] if options["limit"] else manifest.transitions
        jobs = [(compose(spec, t), t) for spec in specs for t in transitions]
        out = Path(options["out"]) if options["out"] else out_dir / VERDICTS_FILE
        with VerdictWriter(out) as writer:
            _, tally = annotate_all(
                backend,
                jobs,
                writer=writer,
                parallel=config["parallel"],
                skip_keys=recorded_keys(out),
                progress=True,
            )

        summary = tally.summary()
        (out_dir / COST_FILE).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        self.stdout.write(
            f"{backend.name}: {summary['prompts']} prompts ({summary['skipped']} skipped, {summary['failed']} failed), "
            f"~{summary['estimated_prompt_tokens']} prompt / ~{summary['estimated_response_tokens']} response tokens, "
            f"mean latency {summary['mean_latency_ms']} ms (max {summary['max_latency_ms']}), "
            f"{summary['cache_hits']} cache hits"
        )
        self.stdout.write(f"verdicts -> {out}")
        if tally.failures:
            first = tally.failures[0]
            raise CommandError(
                f"AnnotatorBackendError: {len(tally.failures)} of {len(jobs)} prompts failed; "
                f"first {first['prompt_id']}: {' '.join(first['error'].split())}"
            )
