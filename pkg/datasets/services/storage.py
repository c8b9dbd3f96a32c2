"""
JSONL persistence for datasets and reference labels.

A dataset file starts with one manifest header record followed by one record
per transition; each transition embeds its layout and the rendered gamescreen
of the state before the action. All files are written atomically.
"""

import hashlib
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Optional

from datasets.domain import (
    GENERATOR_VERSION,
    SCHEMA_VERSION,
    CategoryLabel,
    DatasetManifest,
    ReferenceLabel,
    ReferenceLabels,
)
from datasets.serializers import (
    ManifestHeaderSerializer,
    ReferenceRecordSerializer,
    TransitionRecordSerializer,
)
from keyroom.domain import Action, GridLayout, GridState, SubgoalEvent, Transition, canonical_json
from keyroom.services.engine import detect_event
from textview.domain import ViewKind
from textview.services.renderer import render

logger = logging.getLogger(__name__)

HEADER_FIELDS = (
    "kind", "schema_version", "seed", "size", "counts", "created_at", "generator_version",
    "layout_policy", "assisted_rollouts", "step_cap", "checksum",
)
TRANSITION_FIELDS = (
    "kind", "id", "category", "event", "action", "action_label", "task_reward",
    "assisted", "layout", "before", "after", "gamescreen",
)
REFERENCE_FIELDS = ("transition_id", "flags", "annotator_id", "note", "flagged")


class DatasetLoadError(ValueError):
    """Raised for unreadable dataset or reference files; ``offset`` is the byte offset of the bad record."""

    def __init__(self, message: str, offset: Optional[int] = None):
        super().__init__(f"{message} (byte offset {offset})" if offset is not None else message)
        self.offset = offset


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_path = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


def transition_record(t: Transition, assisted: bool = False, extra: Optional[dict] = None) -> dict:
    record = dict(extra or {})
    record.update({
        "kind": "transition",
        "id": t.id,
        "category": int(CategoryLabel.from_event(t.event)),
        "event": t.event.value,
        "action": int(t.action),
        "action_label": t.action.label,
        "task_reward": t.task_reward,
        "assisted": assisted,
        "layout": t.layout.to_record(),
        "before": t.before.to_record(),
        "after": t.after.to_record(),
        "gamescreen": render(t.before, ViewKind.GAMESCREEN).text,
    })
    return record


def serialize_manifest(manifest: DatasetManifest) -> str:
    lines = [
        canonical_json(transition_record(t, t.id in manifest.assisted, manifest.record_extras.get(t.id)))
        for t in manifest.transitions
    ]
    body = "".join(line + "\n" for line in lines)
    header = dict(manifest.extra)
    header.update({
        "kind": "manifest",
        "schema_version": manifest.schema_version,
        "seed": manifest.seed,
        "size": manifest.size,
        "counts": {category.key: n for category, n in manifest.counts.items()},
        "created_at": manifest.created_at,
        "generator_version": manifest.generator_version,
        "layout_policy": manifest.layout_policy,
        "assisted_rollouts": manifest.assisted_rollouts,
        "step_cap": manifest.step_cap,
        "checksum": hashlib.sha256(body.encode("utf-8")).hexdigest(),
    })
    return canonical_json(header) + "\n" + body


def save_manifest(manifest: DatasetManifest, path):
    atomic_write(path, serialize_manifest(manifest))
    logger.info(f"[Storage] Wrote {manifest.size} transitions to {path}")


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    if not path.exists():
        raise DatasetLoadError(f"dataset file not found: {path}")
    return parse_manifest(path.read_bytes(), source=str(path))


def parse_manifest(data: bytes, source: str = "<dataset>") -> DatasetManifest:
    lines = list(_lines_with_offsets(data))
    if not lines:
        raise DatasetLoadError(f"{source}: empty dataset file", offset=0)

    offset, raw_header = lines[0]
    header = _decode(raw_header, offset, source)
    serializer = ManifestHeaderSerializer(data=header)
    if not serializer.is_valid():
        raise DatasetLoadError(f"{source}: invalid manifest header: {dict(serializer.errors)}", offset)
    if header["schema_version"] > SCHEMA_VERSION:
        raise DatasetLoadError(
            f"{source}: schema version {header['schema_version']} is newer than supported version {SCHEMA_VERSION}",
            offset,
        )
    if header["generator_version"] != GENERATOR_VERSION:
        logger.warning(
            f"[Storage] {source} was written by generator {header['generator_version']}, "
            f"this is {GENERATOR_VERSION}; loading with a compatible schema"
        )

    body_start = lines[1][0] if len(lines) > 1 else len(data)
    checksum = hashlib.sha256(data[body_start:]).hexdigest()

    layouts = {}
    transitions = []
    assisted = set()
    record_extras = {}
    seen = set()
    for offset, raw in lines[1:]:
        record = _decode(raw, offset, source)
        t, is_assisted = _transition_from_record(record, offset, source, layouts)
        if t.id in seen:
            raise DatasetLoadError(f"{source}: duplicate transition {t.id}", offset)
        seen.add(t.id)
        transitions.append(t)
        if is_assisted:
            assisted.add(t.id)
        extras = {key: value for key, value in record.items() if key not in TRANSITION_FIELDS}
        if extras:
            record_extras[t.id] = extras

    if len(transitions) != header["size"]:
        raise DatasetLoadError(
            f"{source}: missing transitions, header promises {header['size']} but found {len(transitions)}",
            len(data),
        )
    if checksum != header["checksum"]:
        raise DatasetLoadError(f"{source}: checksum mismatch, file body was modified", body_start)

    manifest = DatasetManifest(
        transitions=tuple(transitions),
        seed=header["seed"],
        created_at=header["created_at"],
        generator_version=header["generator_version"],
        schema_version=header["schema_version"],
        layout_policy=header["layout_policy"],
        step_cap=header["step_cap"],
        assisted_rollouts=header.get("assisted_rollouts", 0),
        assisted=frozenset(assisted),
        extra={key: value for key, value in header.items() if key not in HEADER_FIELDS},
        record_extras=record_extras,
    )
    stored = {category: header["counts"][category.key] for category in CategoryLabel}
    if stored != manifest.counts:
        raise DatasetLoadError(f"{source}: category counts in the header do not match the records", lines[0][0])
    return manifest


def _lines_with_offsets(data: bytes):
    offset = 0
    for raw in data.splitlines(keepends=True):
        if raw.strip():
            yield offset, raw
        offset += len(raw)


def _decode(raw: bytes, offset: int, source: str) -> dict:
    try:
        record = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, ValueError) as e:
        raise DatasetLoadError(f"{source}: unreadable record ({e})", offset) from e
    if not isinstance(record, dict):
        raise DatasetLoadError(f"{source}: record is not an object", offset)
    return record


def _transition_from_record(record: dict, offset: int, source: str, layouts: dict) -> tuple:
    serializer = TransitionRecordSerializer(data=record)
    if not serializer.is_valid():
        raise DatasetLoadError(f"{source}: invalid transition record: {dict(serializer.errors)}", offset)

    layout_key = canonical_json(record["layout"])
    layout = layouts.get(layout_key)
    if layout is None:
        try:
            layout = GridLayout.from_record(record["layout"])
        except ValueError as e:
            raise DatasetLoadError(f"{source}: bad layout ({e})", offset) from e
        layouts[layout_key] = layout

    before = GridState.from_record(layout, record["before"])
    after = GridState.from_record(layout, record["after"])
    event = SubgoalEvent(record["event"])
    if detect_event(before, after) is not event:
        raise DatasetLoadError(
            f"{source}: transition {record['id']} is labelled '{event.value}' "
            f"but its snapshots show '{detect_event(before, after).value}'",
            offset,
        )
    t = Transition(
        before=before,
        action=Action(record["action"]),
        after=after,
        task_reward=record["task_reward"],
        event=event,
    )
    if t.id != record["id"]:
        raise DatasetLoadError(f"{source}: stored id {record['id']} does not match recomputed {t.id}", offset)
    return t, bool(record.get("assisted", False))


def reference_record(transition_id: str, label: ReferenceLabel) -> dict:
    record = dict(label.extra)
    record.update({
        "transition_id": transition_id,
        "flags": dict(label.flags),
        "annotator_id": label.annotator_id,
        "note": label.note,
    })
    if label.flagged:
        record["flagged"] = True
    return record


def save_reference(labels: ReferenceLabels, path):
    text = "".join(canonical_json(reference_record(tid, label)) + "\n" for tid, label in labels.labels.items())
    atomic_write(path, text)
    logger.info(f"[Storage] Wrote {len(labels)} reference labels to {path}")


def load_reference(path, manifest: Optional[DatasetManifest] = None) -> ReferenceLabels:
    """
    Reads reference labels. With ``manifest`` the labels must cover every one
    of its transitions exactly once; flagged labels count as covering.
    Unknown record fields are kept on the label and written back by
    ``save_reference``.
    """
    path = Path(path)
    if not path.exists():
        raise DatasetLoadError(f"reference file not found: {path}")
    data = path.read_bytes()
    labels = {}
    for offset, raw in _lines_with_offsets(data):
        record = _decode(raw, offset, path.name)
        serializer = ReferenceRecordSerializer(data=record)
        if not serializer.is_valid():
            raise DatasetLoadError(f"{path.name}: invalid reference record: {dict(serializer.errors)}", offset)
        tid = record["transition_id"]
        if tid in labels:
            raise DatasetLoadError(f"{path.name}: transition {tid} is labelled twice", offset)
        labels[tid] = ReferenceLabel(
            flags=dict(serializer.validated_data["flags"]),
            annotator_id=record["annotator_id"],
            note=record.get("note", ""),
            flagged=serializer.validated_data["flagged"],
            extra={key: value for key, value in record.items() if key not in REFERENCE_FIELDS},
        )
    reference = ReferenceLabels(labels=labels)

    if manifest is not None:
        missing = reference.missing_from(manifest)
        known = set(manifest.by_id())
        extra = [tid for tid in labels if tid not in known]
        if missing or extra:
            raise DatasetLoadError(
                f"{path.name}: reference does not match the dataset "
                f"({len(missing)} transitions unlabelled, {len(extra)} unknown ids)"
            )
    return reference
