from dataclasses import dataclass, field
from enum import Enum


class ParseStatus(Enum):
    OK = "ok"
    PARTIAL = "partially_parsed"
    UNPARSEABLE = "unparseable"


@dataclass(frozen=True)
class RawResponse:
    text: str
    latency_ms: float
    backend: str
    prompt_id: str
    cached: bool = field(default=False, compare=False)


@dataclass(frozen=True)
class AnnotationVerdict:
    transition_id: str
    config_name: str
    subgoal_flags: dict
    matched_canonical: dict
    parse_status: ParseStatus
    raw: RawResponse

    @property
    def annotator(self) -> str:
        return self.raw.backend

    def to_record(self) -> dict:
        return {
            "prompt_id": self.raw.prompt_id,
            "transition_id": self.transition_id,
            "config_name": self.config_name,
            "backend": self.raw.backend,
            "raw_text": self.raw.text,
            "flags": dict(self.subgoal_flags),
            "matched": dict(self.matched_canonical),
            "parse_status": self.parse_status.value,
            "latency_ms": self.raw.latency_ms,
        }

    @classmethod
    def from_record(cls, record: dict) -> "AnnotationVerdict":
        return cls(
            transition_id=record["transition_id"],
            config_name=record["config_name"],
            subgoal_flags=dict(record["flags"]),
            matched_canonical=dict(record["matched"]),
            parse_status=ParseStatus(record["parse_status"]),
            raw=RawResponse(
                text=record["raw_text"],
                latency_ms=float(record.get("latency_ms") or 0.0),
                backend=record["backend"],
                prompt_id=record["prompt_id"],
            ),
        )
