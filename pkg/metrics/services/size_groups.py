import csv
import io
import re
from typing import Optional

MIXTURE_RE = re.compile(r"(\d+)x(\d+(?:\.\d+)?)b(?![a-z])", re.IGNORECASE)
SIZE_RE = re.compile(r"(\d+(?:\.\d+)?)b(?![a-z])", re.IGNORECASE)
VERSION_SUFFIX_RE = re.compile(r"-v\d[\w.]*$")

# Models whose names carry no size.
KNOWN_PARAMETERS = {
    "c4ai-command-r-v01": 35.0,
    "c4ai-command-r-plus": 104.0,
}

SIZE_COLUMNS = ("family", "annotator", "parameters_billion", "config", "f1")


def parameters_billion(name: str) -> Optional[float]:
    """``gemma-1.1-7b-it`` -> 7, ``Mixtral-8x7B-Instruct`` -> 56; ``None`` when unknown."""
    if name in KNOWN_PARAMETERS:
        return KNOWN_PARAMETERS[name]
    match = MIXTURE_RE.search(name)
    if match:
        return float(match.group(1)) * float(match.group(2))
    match = SIZE_RE.search(name)
    return float(match.group(1)) if match else None


def family(name: str) -> str:
    """The model name up to its size token: ``Meta-Llama-3-70B-Instruct`` -> ``Meta-Llama-3``."""
    match = MIXTURE_RE.search(name) or SIZE_RE.search(name)
    if match:
        return name[:match.start()].rstrip("-_") or name
    return VERSION_SUFFIX_RE.sub("", name)


def size_rows(rows) -> list:
    """One entry per (annotator, config), ordered by family, size and configuration."""
    entries = [
        {
            "family": family(row.annotator),
            "annotator": row.annotator,
            "parameters_billion": parameters_billion(row.annotator),
            "config": row.config_name,
            "f1": row.f1,
        }
        for row in rows
    ]
    return sorted(entries, key=lambda e: (e["family"], e["parameters_billion"] or 0.0, e["config"], e["annotator"]))


def size_csv(rows) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=SIZE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for entry in size_rows(rows):
        writer.writerow({
            **entry,
            "parameters_billion": "" if entry["parameters_billion"] is None else repr(entry["parameters_billion"]),
            "f1": repr(entry["f1"]),
        })
    return buffer.getvalue()
