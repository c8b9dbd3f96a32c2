import json
from pathlib import Path

from annotators.services.backends import (
    GeminiBackend,
    HttpLlmBackend,
    MockBackend,
    OracleBackend,
    RecordedFileBackend,
)
from cli.services.run_config import RunConfig

BACKEND_CHOICES = ("oracle", "mock", "recorded", "http", "gemini")
LLM_KEYS = ("parallel", "llm_endpoint", "llm_model", "api_key", "request_timeout", "max_retries",
            "retry_backoff", "max_tokens")


def add_backend_arguments(parser, *, default="oracle", choices=BACKEND_CHOICES):
    parser.add_argument("--backend", choices=choices, default=default, help="Annotator backend")
    parser.add_argument("--name", help="Annotator name shown in reports")
    parser.add_argument("--responses", help="Mock: a response text file or a directory of *.txt responses")
    parser.add_argument("--recorded", help="Recorded: verdict JSONL file to replay")
    parser.add_argument("--endpoint", dest="llm_endpoint", help="HTTP: chat-completion URL (CALM_LLM_ENDPOINT)")
    parser.add_argument("--model", dest="llm_model", help="HTTP/Gemini: model name (CALM_LLM_MODEL)")
    parser.add_argument("--api-key", dest="api_key", help="HTTP: bearer token (CALM_API_KEY, never written)")
    parser.add_argument("--request-template", dest="request_template", help="HTTP: JSON file describing the request body")
    parser.add_argument("--max-tokens", dest="max_tokens", type=int, help="Response token limit (CALM_MAX_TOKENS)")
    parser.add_argument("--max-retries", dest="max_retries", type=int, help="Retries per request (CALM_MAX_RETRIES)")


def build_backend(kind: str, config: RunConfig, options: dict):
    name = options.get("name")
    if kind == "oracle":
        return OracleBackend(name or "Oracle")
    if kind == "mock":
        return MockBackend(_mock_script(options.get("responses")), name=name or "Mock")
    if kind == "recorded":
        if not options.get("recorded"):
            raise ValueError("--backend recorded needs --recorded PATH")
        path = Path(options["recorded"])
        if not path.exists():
            raise FileNotFoundError(f"recorded verdict file not found: {path}")
        return RecordedFileBackend(path, name=name)
    if kind == "http":
        if not config["llm_endpoint"] or not config["llm_model"]:
            raise ValueError("--backend http needs --endpoint and --model (or CALM_LLM_ENDPOINT / CALM_LLM_MODEL)")
        template = None
        if options.get("request_template"):
            template = json.loads(Path(options["request_template"]).read_text(encoding="utf-8"))
        return HttpLlmBackend(
            config["llm_endpoint"],
            config["llm_model"],
            name=name,
            api_key=config["api_key"] or None,
            timeout=config["request_timeout"],
            max_retries=config["max_retries"],
            backoff=config["retry_backoff"],
            max_tokens=config["max_tokens"],
            request_template=template,
        )
    if kind == "gemini":
        return GeminiBackend(config["llm_model"] or None, name=name, max_retries=config["max_retries"],
                             backoff=config["retry_backoff"], max_tokens=config["max_tokens"])
    raise ValueError(f"unknown backend {kind!r}; choose from {', '.join(BACKEND_CHOICES)}")


def _mock_script(value):
    if not value:
        raise ValueError("--backend mock needs --responses PATH")
    path = Path(value)
    if path.is_dir():
        files = sorted(path.glob("*.txt"))
        if not files:
            raise FileNotFoundError(f"no *.txt responses in {path}")
        return [f.read_text(encoding="utf-8") for f in files]
    if not path.exists():
        raise FileNotFoundError(f"response file not found: {path}")
    return [path.read_text(encoding="utf-8")]
