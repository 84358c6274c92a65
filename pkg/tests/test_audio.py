import numpy as np
import pytest
from scipy.io import wavfile

from speechcap.audio import AudioClip, load_audio, resample
from speechcap.errors import DecodeError, EmptyAudioError

from helpers import SR, write_wav


def test_silence_identity(tmp_path):
    path = tmp_path / "silence.wav"
    wavfile.write(path, SR, np.zeros(SR, dtype=np.int16))
    clip = load_audio(path, SR)
    assert clip.sample_rate_hz == SR
    assert clip.samples.shape == (SR,)
    assert np.all(clip.samples == 0.0)


def test_stereo_opposite_channels_cancel(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.uniform(-0.5, 0.5, SR).astype(np.float32)
    stereo = np.stack([x, -x], axis=1)
    path = tmp_path / "stereo.wav"
    wavfile.write(path, SR, stereo)
    clip = load_audio(path, SR)
    assert np.max(np.abs(clip.samples)) < 1e-7


def test_stereo_downmix_is_channel_mean(tmp_path):
    rng = np.random.default_rng(1)
    left = rng.uniform(-0.5, 0.5, 4000).astype(np.float32)
    right = rng.uniform(-0.5, 0.5, 4000).astype(np.float32)
    path = tmp_path / "st.wav"
    wavfile.write(path, SR, np.stack([left, right], axis=1))
    clip = load_audio(path, SR)
    np.testing.assert_allclose(clip.samples, (left.astype(np.float64) + right) / 2, atol=1e-7)


def test_resample_48k_sine_peak_within_1hz(tmp_path):
    # FFT-peak oracle on the resampled signal
    sr_in = 48000
    t = np.arange(sr_in) / sr_in
    x = (0.7 * np.sin(2 * np.pi * 440.0 * t)).astype(np.float32)
    path = tmp_path / "sine48.wav"
    wavfile.write(path, sr_in, x)
    clip = load_audio(path, SR)
    assert clip.samples.shape[0] == SR
    spectrum = np.abs(np.fft.rfft(clip.samples * np.hanning(clip.samples.size)))
    freqs = np.fft.rfftfreq(clip.samples.size, 1.0 / SR)
    k = int(np.argmax(spectrum))
    # parabolic interpolation around the FFT peak
    a, b, c = np.log(spectrum[k - 1 : k + 2] + 1e-30)
    shift = 0.5 * (a - c) / (a - 2 * b + c)
    peak_hz = freqs[k] + shift * (freqs[1] - freqs[0])
    assert abs(peak_hz - 440.0) < 1.0


def test_resample_preserves_duration_within_one_sample():
    for sr_in, n in ((48000, 48000), (22050, 33000), (8000, 12345)):
        x = np.random.default_rng(2).uniform(-0.5, 0.5, n)
        y = resample(x, sr_in, SR)
        assert abs(y.size / SR - n / sr_in) <= 1.0 / SR + 1e-12


def test_int16_scaling(tmp_path):
    path = tmp_path / "i16.wav"
    wavfile.write(path, SR, np.array([16384, -16384, 0], dtype=np.int16))
    # pad so the clip is non-trivial
    wavfile.write(path, SR, np.tile(np.array([16384, -16384, 0], dtype=np.int16), 100))
    clip = load_audio(path, SR)
    assert pytest.approx(clip.samples[0], abs=1e-9) == 0.5


def test_float_wav_peak_normalized(tmp_path):
    path = tmp_path / "hot.wav"
    wavfile.write(path, SR, (np.ones(1000) * 2.0).astype(np.float32))
    clip = load_audio(path, SR)
    assert np.max(np.abs(clip.samples)) <= 1.0


def test_zero_length_audio_raises(tmp_path):
    path = tmp_path / "empty.wav"
    wavfile.write(path, SR, np.zeros(0, dtype=np.int16))
    with pytest.raises(EmptyAudioError):
        load_audio(path, SR)


def test_garbage_file_raises_decode_error(tmp_path):
    path = tmp_path / "garbage.wav"
    path.write_bytes(b"not a riff file at all")
    with pytest.raises(DecodeError):
        load_audio(path, SR)


def test_missing_file_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_audio(tmp_path / "nope.wav", SR)


def test_clip_invariants():
    with pytest.raises(ValueError):
        AudioClip(4000, np.zeros(100))  # rate too low
    with pytest.raises(ValueError):
        AudioClip(SR, np.zeros(0))
    with pytest.raises(ValueError):
        AudioClip(SR, np.ones(10) * 1.5)  # unnormalized
    clip = AudioClip(SR, np.zeros(SR // 2))
    assert clip.duration_s == pytest.approx(0.5)
