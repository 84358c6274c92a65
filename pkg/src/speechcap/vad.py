"""Energy VAD: two-threshold hysteresis over a tracked noise floor."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audio import AudioClip
from .frames import DEFAULT_PLAN, FramePlan, frame_powers, power_db

# Thresholds in dB over the tracked noise floor.
ENTER_DELTA_DB = 6.0
EXIT_DELTA_DB = 3.0
# Absolute level below which a frame can never be speech, and above which a
# flat clip (no floor/speech separation) is treated as all speech.
SILENCE_FLOOR_DBFS = -55.0
NOISE_FLOOR_PERCENTILE = 20.0


@dataclass(frozen=True)
class VadResult:
    mask: np.ndarray  # bool, one entry per frame
    speech_duration_s: float
    noise_floor_db: float


def detect_speech(clip: AudioClip, plan: FramePlan = DEFAULT_PLAN) -> VadResult:
    """Per-frame speech mask plus total speech duration.

    The noise floor is tracked as a low percentile of the frame energy
    distribution; frames enter the speech state above floor+ENTER and leave
    below floor+EXIT (hysteresis). Clips whose energy spread is below the
    entry threshold have no separable floor and are classified wholesale by
    absolute level, so an all-silence clip yields an all-false mask and a
    wall-to-wall tone an all-true one.
    """
    powers = frame_powers(clip.samples, clip.sample_rate_hz, plan)
    n = powers.shape[0]
    if n == 0:
        return VadResult(np.zeros(0, dtype=bool), 0.0, float("-inf"))
    db = power_db(powers)
    floor = float(np.percentile(db, NOISE_FLOOR_PERCENTILE))
    spread = float(np.max(db) - floor)

    if spread < ENTER_DELTA_DB:
        speech = floor > SILENCE_FLOOR_DBFS
        mask = np.full(n, speech, dtype=bool)
    else:
        enter = floor + ENTER_DELTA_DB
        exit_ = floor + EXIT_DELTA_DB
        mask = np.zeros(n, dtype=bool)
        in_speech = False
        for i in range(n):
            if db[i] <= SILENCE_FLOOR_DBFS:
                in_speech = False
            elif in_speech:
                in_speech = db[i] >= exit_
            else:
                in_speech = db[i] >= enter
            mask[i] = in_speech

    duration = float(plan.hop_s * int(mask.sum()))
    return VadResult(mask=mask, speech_duration_s=duration, noise_floor_db=floor)
