import numpy as np

from speechcap.audio import AudioClip
from speechcap.frames import DEFAULT_PLAN
from speechcap.vad import detect_speech

from helpers import SR, tone


def test_all_zero_clip_all_false():
    clip = AudioClip(SR, np.zeros(SR))
    result = detect_speech(clip)
    assert result.mask.size == DEFAULT_PLAN.n_frames(SR, SR)
    assert not result.mask.any()
    assert result.speech_duration_s == 0.0


def test_constant_tone_all_true():
    result = detect_speech(tone(220, 2.0, amp=0.9))
    assert result.mask.all()


def test_burst_extent_recovered():
    # 0.5 s silence-level noise + 1.0 s burst 20 dB above + 0.5 s silence
    rng = np.random.default_rng(42)
    floor_amp = 0.01
    x = rng.standard_normal(2 * SR) * floor_amp
    x[SR // 2 : SR // 2 + SR] += rng.standard_normal(SR) * floor_amp * 10
    x = x / np.max(np.abs(x)) * 0.9
    result = detect_speech(AudioClip(SR, x))
    assert 0.8 <= result.speech_duration_s <= 1.2


def test_speech_duration_is_hop_times_count():
    result = detect_speech(tone(150, 1.0))
    assert result.speech_duration_s == DEFAULT_PLAN.hop_s * int(result.mask.sum())


def test_quiet_constant_noise_is_not_speech():
    rng = np.random.default_rng(3)
    x = rng.standard_normal(SR) * 1e-4  # ~ -80 dBFS: inaudible hiss
    result = detect_speech(AudioClip(SR, x))
    assert not result.mask.any()


def test_short_clip_yields_empty_mask():
    clip = AudioClip(SR, np.zeros(100))  # shorter than one frame
    result = detect_speech(clip)
    assert result.mask.size == 0
    assert result.speech_duration_s == 0.0
