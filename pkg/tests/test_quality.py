import numpy as np
import pytest

from speechcap.audio import AudioClip
from speechcap.errors import UndefinedAttributeError
from speechcap.quality import estimate_quality
from speechcap.vad import detect_speech

from helpers import SR, synth_speech


@pytest.fixture(scope="module")
def clean():
    clip = AudioClip(SR, synth_speech(seed=3))
    return clip, detect_speech(clip).mask


@pytest.fixture(scope="module")
def noisy():
    # speech buried in equal-power white noise (~0 dB)
    rng = np.random.default_rng(11)
    speech = synth_speech(seed=5)
    power = np.mean(speech[np.abs(speech) > 1e-3] ** 2)
    x = speech + rng.standard_normal(speech.size) * np.sqrt(power)
    x = x / np.max(np.abs(x)) * 0.95
    clip = AudioClip(SR, x)
    return clip, detect_speech(clip).mask


def test_clean_dry_high_score(clean):
    clip, mask = clean
    assert estimate_quality(clip, 60.0, 60.0, mask) >= 4.0


def test_zero_snr_low_score(noisy):
    clip, mask = noisy
    assert estimate_quality(clip, 0.0, 10.0, mask) <= 2.0


def test_monotone_in_snr(clean):
    clip, mask = clean
    scores = [estimate_quality(clip, snr, 30.0, mask) for snr in range(-10, 61, 5)]
    assert all(b >= a - 1e-12 for a, b in zip(scores, scores[1:]))


def test_monotone_in_c50(clean):
    clip, mask = clean
    scores = [estimate_quality(clip, 30.0, c50, mask) for c50 in range(-10, 61, 5)]
    assert all(b >= a - 1e-12 for a, b in zip(scores, scores[1:]))


def test_range(clean):
    clip, mask = clean
    for snr in (-10.0, 20.0, 60.0):
        for c50 in (-10.0, 20.0, 60.0):
            assert 1.0 <= estimate_quality(clip, snr, c50, mask) <= 4.5


def test_undefined_inputs_raise(clean):
    clip, mask = clean
    with pytest.raises(UndefinedAttributeError):
        estimate_quality(clip, None, 30.0, mask)
    with pytest.raises(UndefinedAttributeError):
        estimate_quality(clip, 30.0, None, mask)
