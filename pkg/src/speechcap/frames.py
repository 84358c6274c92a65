"""Frame plan and frame-level helpers shared by the estimators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

POWER_EPS = 1e-12  # ~ -120 dBFS, below any representable signal


@dataclass(frozen=True)
class FramePlan:
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    window: str = "hann"

    def __post_init__(self):
        if not self.frame_ms > self.hop_ms > 0:
            raise ValueError("require frame_ms > hop_ms > 0")

    def frame_len(self, rate_hz: int) -> int:
        return int(round(self.frame_ms * rate_hz / 1000.0))

    def hop_len(self, rate_hz: int) -> int:
        return int(round(self.hop_ms * rate_hz / 1000.0))

    def n_frames(self, n_samples: int, rate_hz: int) -> int:
        frame = self.frame_len(rate_hz)
        if n_samples < frame:
            return 0
        return 1 + (n_samples - frame) // self.hop_len(rate_hz)

    @property
    def hop_s(self) -> float:
        return self.hop_ms / 1000.0


DEFAULT_PLAN = FramePlan()


def frame_signal(samples: np.ndarray, frame_len: int, hop_len: int) -> np.ndarray:
    """(n_frames, frame_len) strided view over the signal."""
    n = samples.shape[0]
    if n < frame_len:
        return np.empty((0, frame_len), dtype=samples.dtype)
    n_frames = 1 + (n - frame_len) // hop_len
    stride = samples.strides[0]
    return np.lib.stride_tricks.as_strided(
        samples, shape=(n_frames, frame_len), strides=(stride * hop_len, stride)
    )


def frame_powers(samples: np.ndarray, rate_hz: int, plan: FramePlan = DEFAULT_PLAN) -> np.ndarray:
    """Mean-square power per frame (unwindowed)."""
    frames = frame_signal(samples, plan.frame_len(rate_hz), plan.hop_len(rate_hz))
    if frames.shape[0] == 0:
        return np.empty(0)
    return np.mean(frames * frames, axis=1)


def power_db(powers: np.ndarray) -> np.ndarray:
    return 10.0 * np.log10(powers + POWER_EPS)


def spectral_flatness(
    samples: np.ndarray,
    rate_hz: int,
    plan: FramePlan = DEFAULT_PLAN,
    mask: np.ndarray | None = None,
) -> float:
    """Mean per-frame spectral flatness (geometric / arithmetic PSD mean).

    Near 1 for noise-like frames, near 0 for tonal ones. Uses Hann-windowed
    frames; DC bin excluded. Returns nan when no frames are selected.
    """
    frames = frame_signal(samples, plan.frame_len(rate_hz), plan.hop_len(rate_hz))
    if frames.shape[0] == 0:
        return float("nan")
    if mask is not None:
        frames = frames[mask[: frames.shape[0]]]
        if frames.shape[0] == 0:
            return float("nan")
    window = np.hanning(frames.shape[1])
    spec = np.abs(np.fft.rfft(frames * window, axis=1)) ** 2
    spec = spec[:, 1:] + POWER_EPS
    flat = np.exp(np.mean(np.log(spec), axis=1)) / np.mean(spec, axis=1)
    return float(np.mean(flat))
