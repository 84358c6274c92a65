"""WAV decoding, downmixing and resampling to the internal rate.

All downstream estimators run at one fixed mono rate (default 16 kHz),
so everything funnels through :func:`load_audio`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.io import wavfile
from scipy.signal import resample_poly

from .errors import DecodeError, EmptyAudioError

INTERNAL_RATE_HZ = 16000

_PCM_SCALES = {
    np.dtype(np.int16): 32768.0,
    np.dtype(np.int32): 2147483648.0,
}


@dataclass(frozen=True)
class AudioClip:
    """Mono audio, amplitudes in [-1, 1]."""

    sample_rate_hz: int
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioClip samples must be mono (1-D)")
        if samples.size == 0:
            raise ValueError("AudioClip must contain at least one sample")
        if self.sample_rate_hz < 8000:
            raise ValueError("sample_rate_hz must be >= 8000")
        if np.max(np.abs(samples)) > 1.0 + 1e-9:
            raise ValueError("samples must be normalized to [-1, 1]")
        object.__setattr__(self, "samples", samples)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz


def _to_float(data: np.ndarray) -> np.ndarray:
    if data.dtype in _PCM_SCALES:
        return data.astype(np.float64) / _PCM_SCALES[data.dtype]
    if data.dtype == np.uint8:
        return (data.astype(np.float64) - 128.0) / 128.0
    if data.dtype in (np.float32, np.float64):
        return data.astype(np.float64)
    raise DecodeError(f"unsupported WAV sample format {data.dtype}")


def resample(samples: np.ndarray, rate_hz: int, target_rate_hz: int) -> np.ndarray:
    """Band-limited polyphase resampling."""
    if rate_hz == target_rate_hz:
        return samples
    ratio = Fraction(target_rate_hz, rate_hz)
    return resample_poly(samples, ratio.numerator, ratio.denominator)


def load_audio(audio_ref, target_rate_hz: int = INTERNAL_RATE_HZ) -> AudioClip:
    """Decode a RIFF/WAVE file to a mono clip at ``target_rate_hz``.

    Stereo input is downmixed by channel average before resampling.
    Peak normalization is applied only when the absolute peak exceeds 1
    (possible for float WAVs and after resampling overshoot).
    """
    try:
        rate, data = wavfile.read(audio_ref)
    except FileNotFoundError:
        raise
    except Exception as exc:
        raise DecodeError(f"cannot decode {audio_ref}: {exc}") from exc
    if data.size == 0:
        raise EmptyAudioError(f"{audio_ref} contains no samples")
    samples = _to_float(data)
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    elif samples.ndim != 1:
        raise DecodeError(f"{audio_ref}: unsupported channel layout {data.shape}")
    samples = resample(samples, int(rate), int(target_rate_hz))
    if samples.size == 0:
        raise EmptyAudioError(f"{audio_ref} resampled to zero samples")
    peak = np.max(np.abs(samples))
    if peak > 1.0:
        samples = samples / peak
    return AudioClip(sample_rate_hz=int(target_rate_hz), samples=samples)
