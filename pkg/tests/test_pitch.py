import numpy as np
import pytest

from speechcap.audio import AudioClip
from speechcap.pitch import estimate_f0
from speechcap.vad import detect_speech

from helpers import SR, sawtooth, tone


def stats_for(clip):
    vad = detect_speech(clip)
    return estimate_f0(clip, vad.mask)


@pytest.mark.parametrize("freq", [110.0, 220.0, 440.0])
def test_pure_sine(freq):
    s = stats_for(tone(freq))
    assert abs(s.f0_mean_hz - freq) < 3.0
    assert s.f0_std_hz < 5.0
    assert s.voiced_fraction > 0.9


@pytest.mark.parametrize("freq", [110.0, 220.0, 440.0])
def test_sawtooth(freq):
    s = stats_for(sawtooth(freq))
    assert abs(s.f0_mean_hz - freq) < 3.0
    assert s.f0_std_hz < 5.0


def test_white_noise_undefined():
    rng = np.random.default_rng(0)
    clip = AudioClip(SR, rng.standard_normal(3 * SR) * 0.5)
    s = stats_for(clip)
    assert s.f0_mean_hz is None
    assert s.f0_std_hz is None
    assert s.voiced_fraction == 0.0


def test_alternating_sawtooth_statistics():
    # 1 s at 110 Hz then 1 s at 220 Hz: oracle is the two-valued track
    from scipy import signal

    t = np.arange(SR) / SR
    x = np.concatenate(
        [0.8 * signal.sawtooth(2 * np.pi * 110 * t), 0.8 * signal.sawtooth(2 * np.pi * 220 * t)]
    )
    s = stats_for(AudioClip(SR, x))
    assert 155.0 <= s.f0_mean_hz <= 175.0
    assert 50.0 <= s.f0_std_hz <= 60.0


def test_amplitude_scale_invariance():
    base = tone(220)
    ref = stats_for(base)
    for g in (0.1, 0.3, 1.0):
        scaled = AudioClip(SR, base.samples * g)
        s = stats_for(scaled)
        assert s.f0_mean_hz == pytest.approx(ref.f0_mean_hz, abs=1e-9)
        assert s.f0_std_hz == pytest.approx(ref.f0_std_hz, abs=1e-9)


def test_time_shift_invariance():
    # prepend silence in whole hops to a clip that already starts silent
    from helpers import synth_speech

    hop = 160
    base = synth_speech(seed=5, bursts=3)
    ref = stats_for(AudioClip(SR, base))
    for n_hops in (20, 50):
        shifted = np.concatenate([np.zeros(n_hops * hop), base])
        s = stats_for(AudioClip(SR, shifted))
        assert abs(s.f0_mean_hz - ref.f0_mean_hz) < 1.0
        assert abs(s.f0_std_hz - ref.f0_std_hz) < 1.0


def test_runtime_under_one_second_per_clip():
    import time

    clip = sawtooth(220)
    t0 = time.perf_counter()
    stats_for(clip)
    assert time.perf_counter() - t0 < 1.0
