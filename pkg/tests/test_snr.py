import numpy as np
import pytest

from speechcap.audio import AudioClip
from speechcap.errors import UndefinedAttributeError
from speechcap.frames import DEFAULT_PLAN
from speechcap.snr import blind_snr, estimate_snr
from speechcap.vad import detect_speech

from helpers import SR

INTERVALS = [(0.5, 1.5), (2.0, 3.2)]


def make_mixture(snr_db: float, seed: int = 1):
    """Speech-band bursts + continuous white noise at an exact power ratio.

    Returns the clip and the ground-truth frame mask derived from the
    construction (frames fully inside a burst are speech)."""
    rng = np.random.default_rng(seed)
    n = 4 * SR
    speech = np.zeros(n)
    for a, b in INTERVALS:
        i0, i1 = int(a * SR), int(b * SR)
        seg = rng.standard_normal(i1 - i0)
        mod = 0.6 + 0.4 * np.sin(2 * np.pi * 3.0 * np.arange(i1 - i0) / SR)
        speech[i0:i1] = seg * mod
    speech_power = np.mean(speech[speech != 0.0] ** 2)
    sigma = np.sqrt(speech_power / 10.0 ** (snr_db / 10.0))
    x = speech + rng.standard_normal(n) * sigma
    x = x / np.max(np.abs(x)) * 0.95

    frame = DEFAULT_PLAN.frame_len(SR)
    hop = DEFAULT_PLAN.hop_len(SR)
    n_frames = DEFAULT_PLAN.n_frames(n, SR)
    mask = np.zeros(n_frames, dtype=bool)
    for i in range(n_frames):
        start, end = i * hop, i * hop + frame
        mask[i] = any(int(a * SR) <= start and end <= int(b * SR) for a, b in INTERVALS)
    return AudioClip(SR, x), mask


@pytest.mark.parametrize("true_db,tol", [(0, 4.0), (10, 3.0), (20, 3.0), (30, 3.0)])
def test_constructed_mixture_with_true_mask(true_db, tol):
    clip, mask = make_mixture(true_db)
    assert abs(estimate_snr(clip, mask) - true_db) <= tol


def test_mixture_with_vad_mask_at_10db():
    clip, _ = make_mixture(10.0)
    vad = detect_speech(clip)
    assert 7.0 <= estimate_snr(clip, vad.mask) <= 13.0


def test_digital_silence_gaps_clamp_to_60():
    x = np.zeros(2 * SR)
    x[SR // 2 : SR] = 0.5 * np.sin(2 * np.pi * 500 * np.arange(SR // 2) / SR)
    clip = AudioClip(SR, x)
    vad = detect_speech(clip)
    assert estimate_snr(clip, vad.mask) == 60.0


def test_all_false_mask_is_undefined():
    clip, mask = make_mixture(10.0)
    with pytest.raises(UndefinedAttributeError):
        estimate_snr(clip, np.zeros_like(mask))


def test_blind_fallback_on_continuous_speech():
    # Amplitude-distribution estimate engages when non-speech frames < 5%
    rng = np.random.default_rng(7)
    n = 3 * SR
    for true_db in (10.0, 20.0):
        s = rng.gamma(0.4, 1.0, n) * rng.choice([-1.0, 1.0], n)
        s /= np.sqrt(np.mean(s * s))
        x = s + rng.standard_normal(n) * 10.0 ** (-true_db / 20.0)
        x /= np.max(np.abs(x))
        clip = AudioClip(SR, x)
        mask = np.ones(DEFAULT_PLAN.n_frames(n, SR), dtype=bool)
        assert abs(estimate_snr(clip, mask) - true_db) <= 3.0


def test_blind_snr_scale_invariant():
    rng = np.random.default_rng(9)
    x = rng.gamma(0.4, 1.0, SR) * rng.choice([-1.0, 1.0], SR)
    x /= np.max(np.abs(x))
    assert blind_snr(x) == pytest.approx(blind_snr(x * 0.1), abs=1e-9)


def test_more_noise_never_increases_estimate():
    prev = None
    for true_db in (30, 20, 10, 5, 0):
        clip, mask = make_mixture(true_db, seed=5)
        est = estimate_snr(clip, mask)
        if prev is not None:
            assert est <= prev + 1e-9
        prev = est


def test_amplitude_scale_changes_under_half_db():
    clip, mask = make_mixture(15.0)
    ref = estimate_snr(clip, mask)
    for g in (0.1, 0.5, 1.0):
        scaled = AudioClip(SR, clip.samples * g)
        assert abs(estimate_snr(scaled, mask) - ref) < 0.5


def test_result_clamped():
    clip, mask = make_mixture(10.0)
    assert -10.0 <= estimate_snr(clip, mask) <= 60.0
