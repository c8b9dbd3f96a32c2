"""
Django settings for the CALM harness.

Every tunable is read from the environment; a ``.env`` file at the project
root is loaded first when present.
"""
import os
from pathlib import Path

from dotenv import load_dotenv

BASE_DIR = Path(__file__).resolve().parent.parent
load_dotenv(os.path.join(BASE_DIR, ".env"))

SECRET_KEY = os.getenv("DJANGO_SECRET_KEY", "calm-harness-local")
DEBUG = os.getenv("DJANGO_DEBUG", "False") == "True"
ALLOWED_HOSTS = []

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "django.contrib.auth",
    "rest_framework",

    "keyroom",
    "textview",
    "promptkit",
    "annotators",
    "datasets",
    "metrics",
    "shaper",
    "cli",
]

# ===== HARNESS =====

CALM_WORKSPACE = Path(os.getenv("CALM_WORKSPACE", BASE_DIR / "workspace"))
CALM_LOG_LEVEL = os.getenv("CALM_LOG_LEVEL", "INFO").upper()

# Generic chat-completion endpoint; the key is never written to disk.
CALM_LLM_ENDPOINT = os.getenv("CALM_LLM_ENDPOINT", "")
CALM_LLM_MODEL = os.getenv("CALM_LLM_MODEL", "")
CALM_API_KEY = os.getenv("CALM_API_KEY", "")

CALM_REQUEST_TIMEOUT = float(os.getenv("CALM_REQUEST_TIMEOUT", "120"))
CALM_MAX_RETRIES = int(os.getenv("CALM_MAX_RETRIES", "3"))
CALM_RETRY_BACKOFF = float(os.getenv("CALM_RETRY_BACKOFF", "1.0"))
CALM_MAX_TOKENS = int(os.getenv("CALM_MAX_TOKENS", "1024"))
CALM_RAW_RESPONSE_CAP = int(os.getenv("CALM_RAW_RESPONSE_CAP", "16384"))
CALM_PARALLEL = int(os.getenv("CALM_PARALLEL", "4"))

# ===== GEMINI =====

# False = Gemini API (GEMINI_API_KEY)
# True = Vertex AI (Google Cloud project and credentials)
GEMINI_API_KEY = os.getenv("GEMINI_API_KEY")
USE_VERTEX_AI = os.getenv("USE_VERTEX_AI", "False") == "True"
VERTEX_PROJECT_ID = os.getenv("VERTEX_PROJECT_ID", "")
VERTEX_LOCATION = os.getenv("VERTEX_LOCATION", "us-central1")

# Database: only the annotator response cache lives here.
DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": CALM_WORKSPACE / "calm.sqlite3",
    }
}

LANGUAGE_CODE = "en-us"
TIME_ZONE = "UTC"
USE_I18N = False
USE_TZ = True

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

REST_FRAMEWORK = {
    "DEFAULT_AUTHENTICATION_CLASSES": (),
    "DEFAULT_PERMISSION_CLASSES": (),
    "UNAUTHENTICATED_USER": None,
}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(asctime)s %(levelname)s %(name)s %(message)s"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "plain"},
    },
    "root": {"handlers": ["console"], "level": "WARNING"},
    "loggers": {
        app: {"handlers": ["console"], "level": CALM_LOG_LEVEL, "propagate": False}
        for app in ("keyroom", "textview", "promptkit", "annotators", "datasets", "metrics", "shaper", "cli")
    },
}
