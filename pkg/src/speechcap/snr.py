"""Signal-to-noise estimation.

Primary path: energy ratio between speech and non-speech frames under the
VAD mask. When almost everything is speech (non-speech frames < 5%) there
is no noise-floor segment to measure, so a blind estimate based on the
waveform amplitude distribution is used instead: speech amplitudes follow
a heavy-tailed two-sided gamma law (shape 0.4) while additive noise is
close to Gaussian, and the scale-free statistic

    G = ln(mean |x|) - mean(ln |x|)

moves monotonically between the two regimes as the mixture SNR changes.
The G -> SNR mapping is built once per process from the model itself with
a fixed-seed sampler, so no tabulated constants are imported.
"""

from __future__ import annotations

import numpy as np

from .audio import AudioClip
from .errors import UndefinedAttributeError
from .frames import DEFAULT_PLAN, POWER_EPS, FramePlan, frame_powers

SNR_CLAMP_DB = (-10.0, 60.0)
MIN_NOISE_FRAME_FRACTION = 0.05

_GAMMA_SHAPE = 0.4
_TABLE_SNR_DB = np.arange(-20.0, 61.0, 1.0)
_TABLE_SAMPLES = 2_000_000
_TABLE_SEED = 20240811

_g_table: np.ndarray | None = None


def _amplitude_statistic(x: np.ndarray) -> float:
    a = np.abs(x)
    a = a[a > 0]
    if a.size == 0:
        raise UndefinedAttributeError("snr_db", "all-zero signal")
    return float(np.log(np.mean(a)) - np.mean(np.log(a)))


def _build_g_table() -> np.ndarray:
    rng = np.random.default_rng(_TABLE_SEED)
    theta = 1.0 / np.sqrt(_GAMMA_SHAPE * (_GAMMA_SHAPE + 1.0))  # unit speech power
    speech = rng.gamma(_GAMMA_SHAPE, theta, _TABLE_SAMPLES)
    speech *= rng.choice([-1.0, 1.0], _TABLE_SAMPLES)
    noise = rng.standard_normal(_TABLE_SAMPLES)
    g = np.empty_like(_TABLE_SNR_DB)
    for i, snr_db in enumerate(_TABLE_SNR_DB):
        sigma = 10.0 ** (-snr_db / 20.0)
        g[i] = _amplitude_statistic(speech + sigma * noise)
    # G increases with SNR; force monotonicity against sampling jitter.
    return np.maximum.accumulate(g)


def blind_snr(samples: np.ndarray) -> float:
    """Blind SNR estimate from the waveform amplitude distribution."""
    global _g_table
    if _g_table is None:
        _g_table = _build_g_table()
    g_obs = _amplitude_statistic(samples)
    g_obs = float(np.clip(g_obs, _g_table[0], _g_table[-1]))
    snr = float(np.interp(g_obs, _g_table, _TABLE_SNR_DB))
    return float(np.clip(snr, *SNR_CLAMP_DB))


def estimate_snr(
    clip: AudioClip, mask: np.ndarray, plan: FramePlan = DEFAULT_PLAN
) -> float:
    """SNR in dB from speech/non-speech frame energies under ``mask``.

    Raises :class:`UndefinedAttributeError` when the mask contains no
    speech frames. Falls back to :func:`blind_snr` when fewer than 5% of
    frames are non-speech. Result clamped to [-10, 60] dB.
    """
    powers = frame_powers(clip.samples, clip.sample_rate_hz, plan)
    n = min(powers.shape[0], mask.shape[0])
    powers, mask = powers[:n], mask[:n]
    if n == 0 or not mask.any():
        raise UndefinedAttributeError("snr_db", "no speech frames")
    n_noise = int((~mask).sum())
    if n_noise < MIN_NOISE_FRAME_FRACTION * n:
        return blind_snr(clip.samples)
    speech_p = float(np.mean(powers[mask]))
    noise_p = float(np.mean(powers[~mask]))
    snr = 10.0 * np.log10((speech_p + POWER_EPS) / (noise_p + POWER_EPS))
    return float(np.clip(snr, *SNR_CLAMP_DB))
