import numpy as np
import pytest

from speechcap.audio import AudioClip
from speechcap.c50 import c50_from_rir, estimate_c50_blind
from speechcap.errors import UndefinedAttributeError
from speechcap.vad import detect_speech

from helpers import SR, convolve_rir, exponential_rir, synth_speech


def brute_force_c50(rir, sr):
    """Independent oracle: direct sample-wise energy summation."""
    rir = list(float(v) for v in rir)
    peak = max(abs(v) for v in rir)
    threshold = peak * 10.0 ** (-20.0 / 20.0)
    onset = next(i for i, v in enumerate(rir) if abs(v) >= threshold)
    split = onset + round(0.05 * sr)
    early = sum(v * v for v in rir[onset:split])
    late = sum(v * v for v in rir[split:])
    if late <= 0.0:
        return 60.0
    value = 10.0 * np.log10(early / late)
    return float(min(max(value, -10.0), 60.0))


def test_single_impulse_is_60():
    h = np.zeros(SR)
    h[0] = 1.0
    assert c50_from_rir(h, SR) == 60.0


def test_equal_energy_is_zero():
    h = np.zeros(int(0.2 * SR))
    h[0] = 1.0
    h[int(0.06 * SR)] = 1.0
    assert c50_from_rir(h, SR) == pytest.approx(0.0, abs=1e-12)


def test_exponential_decay_matches_oracle():
    tau = 0.030
    h = np.exp(-np.arange(SR) / (tau * SR))
    assert c50_from_rir(h, SR) == pytest.approx(brute_force_c50(h, SR), abs=0.1)


def test_50_random_rirs_match_oracle():
    rng = np.random.default_rng(123)
    for k in range(50):
        n = int(rng.uniform(0.05, 0.4) * SR)
        tau = rng.uniform(0.005, 0.15)
        h = np.exp(-np.arange(n) / (tau * SR)) * rng.standard_normal(n)
        if rng.random() < 0.3:
            h[: int(rng.uniform(0, 0.01) * SR)] = 0.0  # leading dead air
        assert c50_from_rir(h, SR) == pytest.approx(brute_force_c50(h, SR), abs=0.1)


def test_onset_ignores_dead_air():
    h = np.zeros(SR)
    h[SR // 4] = 1.0  # impulse late in the buffer, still all-early after onset
    assert c50_from_rir(h, SR) == 60.0


def test_empty_or_zero_rir_rejected():
    with pytest.raises(ValueError):
        c50_from_rir(np.zeros(0), SR)
    with pytest.raises(ValueError):
        c50_from_rir(np.zeros(100), SR)


# --- blind path ------------------------------------------------------------


def test_dry_speech_high_estimate():
    x = synth_speech(seed=1, bursts=5, gap_s=1.0)
    clip = AudioClip(SR, x)
    vad = detect_speech(clip)
    assert estimate_c50_blind(clip, vad.mask) >= 20.0


def test_reverberation_drops_estimate_by_10db():
    x = synth_speech(seed=1, bursts=5, gap_s=1.0)
    dry_clip = AudioClip(SR, x)
    dry_vad = detect_speech(dry_clip)
    dry_est = estimate_c50_blind(dry_clip, dry_vad.mask)

    wet = convolve_rir(x, exponential_rir(0.100, seed=9))
    wet_clip = AudioClip(SR, wet)
    wet_vad = detect_speech(wet_clip)
    wet_est = estimate_c50_blind(wet_clip, wet_vad.mask)
    assert dry_est - wet_est >= 10.0


def test_longer_decay_never_increases_estimate():
    x = synth_speech(seed=4, bursts=8, gap_s=1.0)
    for k, tau1 in enumerate((0.02, 0.03, 0.04, 0.05)):
        h1 = exponential_rir(tau1, seed=50 + k)
        h2 = exponential_rir(tau1 * 3.5, seed=50 + k)
        c1 = AudioClip(SR, convolve_rir(x, h1))
        c2 = AudioClip(SR, convolve_rir(x, h2))
        e1 = estimate_c50_blind(c1, detect_speech(c1).mask)
        e2 = estimate_c50_blind(c2, detect_speech(c2).mask)
        assert e2 <= e1


def test_all_silence_undefined():
    clip = AudioClip(SR, np.zeros(SR))
    vad = detect_speech(clip)
    with pytest.raises(UndefinedAttributeError):
        estimate_c50_blind(clip, vad.mask)


def test_blind_estimate_clamped():
    x = synth_speech(seed=2)
    clip = AudioClip(SR, x)
    vad = detect_speech(clip)
    assert -10.0 <= estimate_c50_blind(clip, vad.mask) <= 60.0
