"""Line-delimited JSON manifests.

One UTF-8 JSON object per line. Plain manifests hold utterance records;
annotated manifests add ``attributes``, ``labels`` and ``captions``
objects per row. JSON string escaping keeps records on one physical line
regardless of control characters in transcripts, and reading back what
was written reproduces the input field-by-field.

Malformed rows are skipped and reported, never fatal: web-scale corpora
always contain dirt. Duplicate utterance ids are a validation error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .attributes import AcousticAttributes
from .binning import AttributeLabels
from .captions import CaptionSet
from .errors import ManifestError, ManifestValidationError
from .records import UtteranceRecord

AnnotatedRow = tuple[UtteranceRecord, AcousticAttributes, AttributeLabels, CaptionSet]

_REQUIRED_FIELDS = ("utterance_id", "audio_ref", "transcript", "language")


@dataclass(frozen=True)
class SkippedLine:
    line_number: int
    reason: str


@dataclass(frozen=True)
class ManifestReadResult:
    records: tuple[UtteranceRecord, ...]
    skipped: tuple[SkippedLine, ...]

    @property
    def skipped_count(self) -> int:
        return len(self.skipped)


def _parse_line(line: str, line_number: int):
    try:
        row = json.loads(line)
    except json.JSONDecodeError as exc:
        return None, SkippedLine(line_number, f"invalid JSON: {exc.msg}")
    if not isinstance(row, dict):
        return None, SkippedLine(line_number, "row is not an object")
    missing = [f for f in _REQUIRED_FIELDS if not row.get(f)]
    if missing:
        return None, SkippedLine(line_number, f"missing field(s): {', '.join(missing)}")
    try:
        record = UtteranceRecord.from_dict(row)
    except (ValueError, TypeError, KeyError) as exc:
        return None, SkippedLine(line_number, f"invalid record: {exc}")
    return (record, row), None


def _read_rows(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    parsed = []
    skipped = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        ok, skip = _parse_line(line, line_number)
        if skip is not None:
            skipped.append(skip)
        else:
            parsed.append(ok)
    ids = [record.utterance_id for record, _ in parsed]
    duplicates = sorted({i for i in ids if ids.count(i) > 1}) if len(set(ids)) != len(ids) else []
    if duplicates:
        raise ManifestValidationError(
            f"duplicate utterance ids in {path}: {', '.join(duplicates)}",
            duplicates=duplicates,
        )
    return parsed, skipped


def read_manifest(path) -> ManifestReadResult:
    """All parseable records in file order plus a skip report."""
    parsed, skipped = _read_rows(path)
    return ManifestReadResult(
        records=tuple(record for record, _ in parsed), skipped=tuple(skipped)
    )


def annotated_row_to_dict(
    record: UtteranceRecord,
    attributes: AcousticAttributes,
    labels: AttributeLabels,
    captions: CaptionSet,
) -> dict:
    row = record.to_dict()
    row["attributes"] = attributes.to_dict()
    row["labels"] = labels.to_dict()
    row["captions"] = captions.to_dict()
    return row


def annotated_row_from_dict(row: dict) -> AnnotatedRow:
    return (
        UtteranceRecord.from_dict(row),
        AcousticAttributes.from_dict(row["attributes"]),
        AttributeLabels.from_dict(row["labels"]),
        CaptionSet.from_dict(row["captions"]),
    )


def dump_row(row: dict) -> str:
    """Canonical one-line serialization (stable key order, exact floats)."""
    return json.dumps(row, sort_keys=True, ensure_ascii=False, separators=(",", ":"))


def write_annotated_manifest(rows: Iterable[AnnotatedRow], path) -> None:
    path = Path(path)
    try:
        with path.open("w", encoding="utf-8") as fh:
            for record, attributes, labels, captions in rows:
                fh.write(dump_row(annotated_row_to_dict(record, attributes, labels, captions)))
                fh.write("\n")
    except OSError as exc:
        raise ManifestError(f"cannot write manifest {path}: {exc}") from exc


def read_annotated_manifest(path) -> tuple[tuple[AnnotatedRow, ...], tuple[SkippedLine, ...]]:
    """Annotated rows plus a skip report; rows lacking any of the three
    annotation objects are skipped with a reason."""
    parsed, skipped = _read_rows(path)
    rows: list[AnnotatedRow] = []
    skipped = list(skipped)
    for record, raw in parsed:
        missing = [k for k in ("attributes", "labels", "captions") if k not in raw]
        if missing:
            skipped.append(
                SkippedLine(0, f"{record.utterance_id}: missing {', '.join(missing)}")
            )
            continue
        try:
            rows.append(annotated_row_from_dict(raw))
        except (ValueError, TypeError, KeyError) as exc:
            skipped.append(SkippedLine(0, f"{record.utterance_id}: {exc}"))
    return tuple(rows), tuple(skipped)


def write_jsonl(rows: Sequence[dict], path) -> None:
    path = Path(path)
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(dump_row(row))
            fh.write("\n")


def read_jsonl(path) -> list[dict]:
    rows = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows
