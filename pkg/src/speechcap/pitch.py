"""Fundamental frequency tracking via the cumulative-mean normalized
difference function (YIN family).

Per frame the difference function

    d(tau) = sum_j (x[j] - x[j+tau])^2,   j in [0, W)

is computed with one FFT cross-correlation per frame block, normalized to

    d'(tau) = d(tau) * tau / sum_{k<=tau} d(k),   d'(0) = 1,

and the first dip of d' below the aperiodicity threshold picks the lag.
Frames whose d' never dips below the threshold are unvoiced. Lags are
refined by parabolic interpolation before conversion to Hz.

The analysis buffer per frame is frame_len + max_lag samples so the frame
grid stays aligned with the VAD mask produced under the same FramePlan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioClip
from .frames import DEFAULT_PLAN, FramePlan, frame_signal

F0_MIN_HZ = 50.0
F0_MAX_HZ = 600.0
APERIODICITY_THRESHOLD = 0.15


@dataclass(frozen=True)
class PitchTrack:
    f0_hz: np.ndarray  # per frame, nan when unvoiced
    voiced: np.ndarray  # bool per frame


@dataclass(frozen=True)
class F0Stats:
    f0_mean_hz: float | None
    f0_std_hz: float | None
    voiced_fraction: float


def _cmndf_block(buffers: np.ndarray, window: int, max_lag: int) -> np.ndarray:
    """Normalized difference function rows for a block of analysis buffers."""
    n, buf_len = buffers.shape
    prefix = buffers[:, :window]
    e0 = np.sum(prefix * prefix, axis=1)

    sq = buffers * buffers
    csum = np.concatenate([np.zeros((n, 1)), np.cumsum(sq, axis=1)], axis=1)
    lags = np.arange(max_lag + 1)
    e_tau = csum[:, lags + window] - csum[:, lags]

    nfft = 1 << int(np.ceil(np.log2(buf_len + 1)))
    spec_full = np.fft.rfft(buffers, nfft, axis=1)
    spec_pre = np.fft.rfft(prefix, nfft, axis=1)
    corr = np.fft.irfft(np.conj(spec_pre) * spec_full, nfft, axis=1)[:, : max_lag + 1]

    d = e0[:, None] + e_tau - 2.0 * corr
    d = np.maximum(d, 0.0)

    denom = np.cumsum(d[:, 1:], axis=1)
    cmndf = np.ones_like(d)
    with np.errstate(divide="ignore", invalid="ignore"):
        cmndf[:, 1:] = d[:, 1:] * lags[1:] / denom
    cmndf[~np.isfinite(cmndf)] = 1.0
    return cmndf


def yin_track(
    clip: AudioClip,
    plan: FramePlan = DEFAULT_PLAN,
    f0_min_hz: float = F0_MIN_HZ,
    f0_max_hz: float = F0_MAX_HZ,
    threshold: float = APERIODICITY_THRESHOLD,
) -> PitchTrack:
    sr = clip.sample_rate_hz
    samples = clip.samples
    n_frames = plan.n_frames(samples.size, sr)
    f0 = np.full(n_frames, np.nan)
    voiced = np.zeros(n_frames, dtype=bool)
    if n_frames == 0:
        return PitchTrack(f0, voiced)

    window = plan.frame_len(sr)
    hop = plan.hop_len(sr)
    max_lag = int(np.ceil(sr / f0_min_hz))
    min_lag = max(2, int(np.floor(sr / f0_max_hz)))
    buf_len = window + max_lag

    buffers = frame_signal(samples, buf_len, hop)
    n_full = buffers.shape[0]  # trailing frames lack a full buffer: unvoiced
    if n_full == 0:
        return PitchTrack(f0, voiced)
    buffers = buffers - buffers.mean(axis=1, keepdims=True)

    cmndf = _cmndf_block(buffers, window, max_lag)

    for i in range(min(n_full, n_frames)):
        row = cmndf[i]
        below = np.nonzero(row[min_lag : max_lag + 1] < threshold)[0]
        if below.size == 0:
            continue
        tau = min_lag + int(below[0])
        while tau + 1 <= max_lag and row[tau + 1] < row[tau]:
            tau += 1
        if 0 < tau < max_lag:
            a, b, c = row[tau - 1], row[tau], row[tau + 1]
            denom = a - 2.0 * b + c
            shift = 0.5 * (a - c) / denom if abs(denom) > 1e-12 else 0.0
            shift = float(np.clip(shift, -0.5, 0.5))
        else:
            shift = 0.0
        hz = sr / (tau + shift)
        if f0_min_hz <= hz <= f0_max_hz:
            f0[i] = hz
            voiced[i] = True
    return PitchTrack(f0, voiced)


def estimate_f0(
    clip: AudioClip,
    mask: np.ndarray,
    plan: FramePlan = DEFAULT_PLAN,
    f0_min_hz: float = F0_MIN_HZ,
    f0_max_hz: float = F0_MAX_HZ,
    threshold: float = APERIODICITY_THRESHOLD,
) -> F0Stats:
    """F0 mean/std over voiced speech frames.

    Returns ``F0Stats(None, None, fraction)`` when no frame is both voiced
    and inside the speech mask; statistics are never silently zero.
    """
    track = yin_track(clip, plan, f0_min_hz, f0_max_hz, threshold)
    n = min(track.voiced.size, mask.size)
    sel = track.voiced[:n] & mask[:n]
    n_speech = int(mask.sum())
    fraction = float(sel.sum() / n_speech) if n_speech else 0.0
    if not sel.any():
        return F0Stats(None, None, fraction)
    values = track.f0_hz[:n][sel]
    return F0Stats(float(np.mean(values)), float(np.std(values)), fraction)
