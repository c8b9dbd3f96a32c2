import logging
from pathlib import Path

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import BaseCommand, CommandError

from annotators.services.annotation_service import VerdictLoadError
from annotators.services.backends import AnnotatorBackendError, RecordedLookupError
from cli.services.run_config import RunConfig, resolve_run_config
from datasets.services.collector import DatasetCollectionError
from datasets.services.storage import DatasetLoadError, load_manifest
from keyroom.services.engine import EnvironmentContractError
from keyroom.services.layout import LayoutError
from metrics.services.ablation import AblationError
from metrics.services.scoring import ScoringError
from promptkit.services.composer import PromptSpecError
from shaper.services.sources import MissingVerdictError
from shaper.services.value_iteration import ValueIterationError

logger = logging.getLogger(__name__)

HANDLED_ERRORS = (
    LayoutError,
    EnvironmentContractError,
    PromptSpecError,
    AnnotatorBackendError,
    RecordedLookupError,
    MissingVerdictError,
    DatasetCollectionError,
    DatasetLoadError,
    VerdictLoadError,
    ScoringError,
    AblationError,
    ValueIterationError,
    FileNotFoundError,
    ValueError,
    KeyError,
)

GLOBAL_KEYS = ("workspace", "seed", "log_level")
DATASET_FILE = "dataset.jsonl"


def error_line(error: Exception) -> str:
    """``<error-kind>: <message>`` on a single line."""
    message = " ".join(str(error).split()) or error.__class__.__name__
    if isinstance(error, KeyError):
        message = message.strip("'\"")
    return f"{error.__class__.__name__}: {message}"


class HarnessCommand(BaseCommand):
    """
    Base for the pipeline commands: global flags, run configuration, log level,
    the output directory with its resolved-config snapshot, and one-line errors.
    Subclasses implement ``add_command_arguments`` and ``run``.
    """

    output_name = None  # default output directory under the workspace
    config_keys = ()  # run-config keys the command reads besides the global ones

    def add_arguments(self, parser):
        parser.add_argument("--workspace", help="Workspace directory (default CALM_WORKSPACE)")
        parser.add_argument("--seed", type=int, help="Random seed")
        parser.add_argument("--log-level", dest="log_level", help="Logging level, e.g. DEBUG or INFO")
        parser.add_argument("--config-file", dest="config_file", help="Flat KEY=value file with run defaults")
        if self.output_name:
            parser.add_argument("--out-dir", dest="out_dir", help=f"Output directory (default <workspace>/{self.output_name})")
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def handle(self, *args, **options):
        try:
            config = resolve_run_config(
                {key: options.get(key) for key in GLOBAL_KEYS + tuple(self.config_keys)},
                config_file=options.get("config_file"),
            )
            self.configure_logging(config)
            out_dir = None
            if self.output_name:
                out_dir = Path(options.get("out_dir") or config.workspace / self.output_name)
                config.write_snapshot(out_dir)
            options.pop("out_dir", None)
            return self.run(config, out_dir, **options)
        except CommandError:
            raise
        except HANDLED_ERRORS as e:
            logger.debug(f"[{self.__class__.__module__.rsplit('.', 1)[-1]}] failed", exc_info=True)
            raise CommandError(error_line(e)) from e

    def configure_logging(self, config: RunConfig):
        level = str(config["log_level"]).upper()
        if not isinstance(logging.getLevelName(level), int):
            raise ValueError(f"unknown log level {config['log_level']!r}")
        for name in ("keyroom", "textview", "promptkit", "annotators", "datasets", "metrics", "shaper", "cli"):
            logging.getLogger(name).setLevel(level)

    def run(self, config: RunConfig, out_dir, **options):
        raise NotImplementedError

    def workspace_path(self, config: RunConfig, value, *default_parts) -> Path:
        """``value`` when given, else a path under the workspace."""
        return Path(value) if value else config.workspace.joinpath(*default_parts)

    def write_file(self, path: Path, text: str) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        self.stdout.write(f"wrote {path}")
        return path

    def add_dataset_argument(self, parser):
        parser.add_argument("--dataset", help=f"Dataset JSONL (default <workspace>/dataset/{DATASET_FILE})")

    def load_dataset(self, config: RunConfig, options: dict):
        return load_manifest(self.workspace_path(config, options.get("dataset"), "dataset", DATASET_FILE))

    def ensure_cache_table(self):
        """Creates the response-cache table on first use."""
        Path(settings.DATABASES["default"]["NAME"]).parent.mkdir(parents=True, exist_ok=True)
        call_command("migrate", "annotators", verbosity=0, interactive=False)
