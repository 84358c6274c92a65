import json

import pytest
from hypothesis import given, settings, strategies as st

from speechcap.attributes import AcousticAttributes
from speechcap.binning import AttributeLabels, DEFAULT_BINNING
from speechcap.captions import CaptionSet
from speechcap.errors import ManifestError, ManifestValidationError
from speechcap.manifest import (
    read_annotated_manifest,
    read_manifest,
    write_annotated_manifest,
)
from speechcap.records import SpeakerMetadata, StyleMetadata, UtteranceRecord


def record(uid="u1", transcript="hello world", language="eng", **kw):
    return UtteranceRecord(
        utterance_id=uid, audio_ref=f"{uid}.wav", transcript=transcript,
        language=language, **kw,
    )


def write_lines(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def test_empty_file(tmp_path):
    path = tmp_path / "m.jsonl"
    path.write_text("")
    result = read_manifest(path)
    assert result.records == ()
    assert result.skipped_count == 0


def test_three_wellformed_lines_in_order(tmp_path):
    path = tmp_path / "m.jsonl"
    rows = [record(f"u{i}").to_dict() for i in range(3)]
    write_lines(path, [json.dumps(r) for r in rows])
    result = read_manifest(path)
    assert [r.utterance_id for r in result.records] == ["u0", "u1", "u2"]
    assert result.skipped_count == 0


def test_missing_transcript_skipped_with_line_number(tmp_path):
    path = tmp_path / "m.jsonl"
    good1 = json.dumps(record("u1").to_dict())
    bad = json.dumps({"utterance_id": "u2", "audio_ref": "u2.wav", "language": "eng"})
    good2 = json.dumps(record("u3").to_dict())
    write_lines(path, [good1, bad, good2])
    result = read_manifest(path)
    assert [r.utterance_id for r in result.records] == ["u1", "u3"]
    assert result.skipped_count == 1
    assert result.skipped[0].line_number == 2
    assert "transcript" in result.skipped[0].reason


def test_invalid_json_skipped(tmp_path):
    path = tmp_path / "m.jsonl"
    write_lines(path, [json.dumps(record("u1").to_dict()), "{not json"])
    result = read_manifest(path)
    assert len(result.records) == 1
    assert result.skipped_count == 1


def test_duplicate_ids_fatal(tmp_path):
    path = tmp_path / "m.jsonl"
    row = json.dumps(record("dup").to_dict())
    write_lines(path, [row, row])
    with pytest.raises(ManifestValidationError) as err:
        read_manifest(path)
    assert err.value.duplicates == ["dup"]


def test_unreadable_file_fatal(tmp_path):
    with pytest.raises(ManifestError):
        read_manifest(tmp_path / "missing.jsonl")


def test_unsupported_language_skipped(tmp_path):
    path = tmp_path / "m.jsonl"
    row = record("u1").to_dict()
    row["language"] = "xx"
    write_lines(path, [json.dumps(row)])
    result = read_manifest(path)
    assert result.records == ()
    assert "language" in result.skipped[0].reason


def _annotated_row(uid="u1", transcript="hello world"):
    rec = UtteranceRecord(
        utterance_id=uid,
        audio_ref=f"{uid}.wav",
        transcript=transcript,
        language="eng",
        speaker=SpeakerMetadata("spk1", "Jaya", "female", "young", "Bengali"),
        style=StyleMetadata("anger", ("street",)),
        duration_s=1.25,
    )
    attrs = AcousticAttributes(
        f0_mean_hz=210.5, f0_std_hz=42.0, snr_db=33.3, c50_db=31.0,
        speaking_rate_sps=6.1, quality_score=4.0, voiced_fraction=0.8,
        speech_duration_s=1.0,
    )
    labels = AttributeLabels(
        pitch="high pitch", pitch_variation="expressive tone",
        reverb="slightly close sounding", snr="clear", rate="slightly fast pace",
        quality="great speech quality", gender="female", age_group="young",
        accent="Bengali", style="anger", env_tags=("street",),
        speaker_name="Jaya", config_version=DEFAULT_BINNING.version,
    )
    captions = CaptionSet(
        descriptive="long text", concise="short", attribute_robust="robust",
        rng_seed=7, robust_retained=("gender", "style", "pitch", "snr"),
    )
    return rec, attrs, labels, captions


def test_annotated_round_trip_field_by_field(tmp_path):
    rows = [_annotated_row(f"u{i}") for i in range(5)]
    path = tmp_path / "annotated.jsonl"
    write_annotated_manifest(rows, path)
    back, skipped = read_annotated_manifest(path)
    assert skipped == ()
    assert back == tuple(rows)
    # plain read returns just the records
    plain = read_manifest(path)
    assert plain.records == tuple(r[0] for r in rows)


def test_empty_sequence_writes_empty_file(tmp_path):
    path = tmp_path / "annotated.jsonl"
    write_annotated_manifest([], path)
    assert path.read_text() == ""


def test_newline_in_transcript_stays_one_line(tmp_path):
    row = _annotated_row("u1", transcript="line one\nline two\ttabbed")
    path = tmp_path / "annotated.jsonl"
    write_annotated_manifest([row], path)
    text = path.read_text(encoding="utf-8")
    assert len(text.splitlines()) == 1
    back, _ = read_annotated_manifest(path)
    assert back[0][0].transcript == "line one\nline two\ttabbed"


def test_undefined_attributes_round_trip(tmp_path):
    rec, _attrs, labels, captions = _annotated_row("u1")
    attrs = AcousticAttributes()  # everything undefined
    path = tmp_path / "annotated.jsonl"
    write_annotated_manifest([(rec, attrs, labels, captions)], path)
    back, _ = read_annotated_manifest(path)
    assert back[0][1] == attrs
    assert back[0][1].f0_mean_hz is None


_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), min_size=1, max_size=40
)


@settings(max_examples=50, deadline=None)
@given(
    transcripts=st.lists(_text, min_size=1, max_size=8),
    language=st.sampled_from(["eng", "hin", "tam"]),
)
def test_round_trip_property(tmp_path_factory, transcripts, language):
    tmp = tmp_path_factory.mktemp("prop")
    rows = []
    for i, transcript in enumerate(transcripts):
        rec, attrs, labels, captions = _annotated_row(f"u{i}")
        rec = UtteranceRecord(
            utterance_id=f"u{i}", audio_ref=rec.audio_ref, transcript=transcript,
            language=language, speaker=rec.speaker, style=rec.style,
            duration_s=rec.duration_s,
        )
        rows.append((rec, attrs, labels, captions))
    path = tmp / "m.jsonl"
    write_annotated_manifest(rows, path)
    back, skipped = read_annotated_manifest(path)
    assert skipped == ()
    assert back == tuple(rows)
