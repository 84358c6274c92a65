"""Reference-free overall quality proxy on a [1.0, 4.5] scale.

A logistic blend of SNR, C50 and a spectral-flatness penalty. Not a
perceptual metric; it exists to give the quality attribute a monotone,
deterministic backbone: the score never decreases when snr_db or c50_db
increase with everything else fixed.
"""

from __future__ import annotations

import math

import numpy as np

from .audio import AudioClip
from .errors import UndefinedAttributeError
from .frames import DEFAULT_PLAN, FramePlan, spectral_flatness

QUALITY_RANGE = (1.0, 4.5)

# Blend calibrated on the synthetic fixture set: dry clean speech at high
# SNR/C50 scores >= 4.0, heavily noisy speech (snr ~ 0 dB) scores <= 2.0.
_SNR_WEIGHT = 0.55
_SNR_CENTER_DB = 18.0
_SNR_SCALE_DB = 7.0
_C50_WEIGHT = 0.25
_C50_CENTER_DB = 12.0
_C50_SCALE_DB = 8.0
_FLATNESS_WEIGHT = 0.20
_FLATNESS_CENTER = 0.35
_FLATNESS_SCALE = 0.12


def _sigmoid(x: float) -> float:
    return 1.0 / (1.0 + math.exp(-x))


def estimate_quality(
    clip: AudioClip,
    snr_db: float | None,
    c50_db: float | None,
    mask: np.ndarray | None = None,
    plan: FramePlan = DEFAULT_PLAN,
) -> float:
    if snr_db is None or c50_db is None:
        raise UndefinedAttributeError("quality_score", "snr or c50 undefined")
    flatness = spectral_flatness(clip.samples, clip.sample_rate_hz, plan, mask)
    if math.isnan(flatness):
        flatness = 1.0  # no usable frames: treat as noise-like
    blend = (
        _SNR_WEIGHT * _sigmoid((snr_db - _SNR_CENTER_DB) / _SNR_SCALE_DB)
        + _C50_WEIGHT * _sigmoid((c50_db - _C50_CENTER_DB) / _C50_SCALE_DB)
        + _FLATNESS_WEIGHT
        * (1.0 - _sigmoid((flatness - _FLATNESS_CENTER) / _FLATNESS_SCALE))
    )
    low, high = QUALITY_RANGE
    return low + (high - low) * float(np.clip(blend, 0.0, 1.0))
