import dataclasses

import numpy as np

from speechcap.attributes import annotate
from speechcap.audio import AudioClip
from speechcap.records import SpeakerMetadata, StyleMetadata, UtteranceRecord

from helpers import SR, synth_speech


def make_record(transcript="hello world this is a test", language="eng"):
    return UtteranceRecord(
        utterance_id="u1",
        audio_ref="u1.wav",
        transcript=transcript,
        language=language,
        speaker=SpeakerMetadata("spk", "Jaya", "female", "young"),
        style=StyleMetadata("neutral"),
    )


def test_composed_fixture_all_attributes_defined():
    clip = AudioClip(SR, synth_speech(seed=7, bursts=4))
    attrs = annotate(make_record(), clip)
    assert attrs.undefined_fields() == ()
    assert 50.0 < attrs.f0_mean_hz < 600.0
    assert attrs.f0_std_hz >= 0.0
    assert -10.0 <= attrs.snr_db <= 60.0
    assert -10.0 <= attrs.c50_db <= 60.0
    assert attrs.speaking_rate_sps > 0.0
    assert 1.0 <= attrs.quality_score <= 4.5
    assert 0.0 <= attrs.voiced_fraction <= 1.0
    assert 0.0 < attrs.speech_duration_s <= clip.duration_s


def test_all_silence_everything_undefined():
    clip = AudioClip(SR, np.zeros(2 * SR))
    attrs = annotate(make_record(), clip)
    assert attrs.speech_duration_s == 0.0
    assert set(attrs.undefined_fields()) == {
        "f0_mean_hz",
        "f0_std_hz",
        "snr_db",
        "c50_db",
        "speaking_rate_sps",
        "quality_score",
        "voiced_fraction",
    }


def test_determinism_bit_identical():
    clip = AudioClip(SR, synth_speech(seed=9))
    record = make_record()
    first = annotate(record, clip)
    second = annotate(record, clip)
    for field in dataclasses.fields(first):
        a = getattr(first, field.name)
        b = getattr(second, field.name)
        assert (a is None and b is None) or a == b


def test_speech_duration_excludes_silence():
    # doubling the trailing silence must not change speech duration
    x = synth_speech(seed=3, bursts=2)
    padded = np.concatenate([x, np.zeros(SR)])
    a = annotate(make_record(), AudioClip(SR, x))
    b = annotate(make_record(), AudioClip(SR, padded))
    assert abs(a.speech_duration_s - b.speech_duration_s) < 0.05
    assert a.speaking_rate_sps == b.speaking_rate_sps or (
        abs(a.speaking_rate_sps - b.speaking_rate_sps) < 0.3
    )
