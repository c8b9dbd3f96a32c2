"""
Run configuration shared by every command. A value comes from the first of:
command-line flag, ``CALM_<KEY>`` environment variable, the ``--config-file``
(flat ``KEY=value`` lines), the project settings.
"""

import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional

from django.conf import settings
from dotenv import dotenv_values

logger = logging.getLogger(__name__)

ENV_PREFIX = "CALM_"
SECRET_KEYS = frozenset({"api_key"})
SNAPSHOT_NAME = "resolved_config.json"


def default_values() -> dict:
    return {
        "workspace": str(getattr(settings, "CALM_WORKSPACE", Path(settings.BASE_DIR) / "workspace")),
        "seed": 0,
        "log_level": getattr(settings, "CALM_LOG_LEVEL", "INFO"),
        "parallel": getattr(settings, "CALM_PARALLEL", 4),
        "llm_endpoint": getattr(settings, "CALM_LLM_ENDPOINT", "") or "",
        "llm_model": getattr(settings, "CALM_LLM_MODEL", "") or "",
        "api_key": getattr(settings, "CALM_API_KEY", "") or "",
        "request_timeout": float(getattr(settings, "CALM_REQUEST_TIMEOUT", 120)),
        "max_retries": getattr(settings, "CALM_MAX_RETRIES", 3),
        "retry_backoff": float(getattr(settings, "CALM_RETRY_BACKOFF", 1.0)),
        "max_tokens": getattr(settings, "CALM_MAX_TOKENS", 1024),
    }


def _coerce(key: str, value, default):
    if value is None or default is None or isinstance(default, str):
        return value
    if isinstance(default, bool):
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ValueError(f"config value for '{key}' must be a boolean, got {value!r}")
    try:
        return type(default)(value)
    except (TypeError, ValueError):
        raise ValueError(f"config value for '{key}' must be {type(default).__name__}, got {value!r}") from None


def read_config_file(path) -> dict:
    """``KEY=value`` file; keys may carry the ``CALM_`` prefix and any case."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    values = {}
    for key, value in dotenv_values(path).items():
        name = key.strip().lower()
        if name.startswith(ENV_PREFIX.lower()):
            name = name[len(ENV_PREFIX):]
        values[name] = value
    return values


@dataclass(frozen=True)
class RunConfig:
    values: dict
    origins: dict = field(default_factory=dict)  # key -> flag | env | file | default

    def __getitem__(self, key: str):
        return self.values[key]

    def get(self, key: str, default=None):
        return self.values.get(key, default)

    @property
    def workspace(self) -> Path:
        return Path(self.values["workspace"])

    def snapshot(self) -> dict:
        return {key: value for key, value in sorted(self.values.items()) if key not in SECRET_KEYS}

    def write_snapshot(self, out_dir) -> Path:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        path = out_dir / SNAPSHOT_NAME
        path.write_text(json.dumps(self.snapshot(), indent=2, sort_keys=True, default=str) + "\n", encoding="utf-8")
        return path


def resolve_run_config(
    flags: Mapping,
    *,
    config_file=None,
    environ: Optional[Mapping] = None,
    defaults: Optional[Mapping] = None,
) -> RunConfig:
    """
    Resolves every known key plus any extra flag. Flags set to ``None`` count
    as not given. Values are coerced to the type of their default.
    """
    environ = os.environ if environ is None else environ
    defaults = dict(default_values() if defaults is None else defaults)
    file_values = read_config_file(config_file) if config_file else {}
    unknown = sorted(set(file_values) - set(defaults))
    if unknown:
        logger.warning(f"[RunConfig] Ignoring unknown keys in {config_file}: {', '.join(unknown)}")

    values, origins = {}, {}
    for key in sorted(set(defaults) | set(flags)):
        default = defaults.get(key)
        env_name = ENV_PREFIX + key.upper()
        if flags.get(key) is not None:
            raw, origin = flags[key], "flag"
        elif key in defaults and environ.get(env_name) not in (None, ""):
            raw, origin = environ[env_name], "env"
        elif key in file_values and file_values[key] not in (None, ""):
            raw, origin = file_values[key], "file"
        else:
            raw, origin = default, "default"
        values[key] = _coerce(key, raw, default)
        origins[key] = origin
    return RunConfig(values=values, origins=origins)
