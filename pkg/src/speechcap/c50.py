"""Speech clarity (C50): exact computation from an impulse response and a
blind estimate from free-decay regions of a recording.

C50 is the dB ratio of impulse-response energy in the first 50 ms after
onset to all later energy. High values mean dry/close speech, low values
reverberant/distant speech.
"""

from __future__ import annotations

import numpy as np

from .audio import AudioClip
from .errors import UndefinedAttributeError
from .frames import DEFAULT_PLAN, POWER_EPS, FramePlan, frame_powers, power_db
from .vad import NOISE_FLOOR_PERCENTILE

C50_CLAMP_DB = (-10.0, 60.0)
EARLY_WINDOW_S = 0.050
ONSET_THRESHOLD_DB = 20.0  # onset = first sample within 20 dB of the peak

# Blind-path tuning.
MAX_DECAY_FRAMES = 60
MIN_DECAY_FRAMES = 4
BURST_OVER_FLOOR_DB = 12.0  # a frame this far above the floor is burst energy
MIN_DECAY_DROP_DB = 8.0
WALKBACK_STEP_DB = 0.3
DECAY_BUMP_TOLERANCE_DB = 0.4
FIT_FLOOR_MARGIN_DB = 3.0
FIT_OVER_FLOOR_DB = 6.0
TRUNCATION_GUARD = 4.0  # fit only where the Schroeder sum dominates the remainder
INSTANT_DECAY_MARGIN_DB = 6.0
ENERGY_DB_PER_SECOND_AT = 8.685889638065037  # decay rate (dB/s) for tau = 1 s


def c50_from_rir(rir: np.ndarray, sample_rate_hz: int) -> float:
    """Exact early/late energy ratio of an impulse response, in dB.

    Onset is the first sample whose magnitude is within 20 dB of the
    global peak. Zero late energy clamps to +60 dB.
    """
    h = np.asarray(rir, dtype=np.float64)
    if h.size == 0:
        raise ValueError("empty impulse response")
    peak = float(np.max(np.abs(h)))
    if peak == 0.0:
        raise ValueError("all-zero impulse response")
    onset = int(np.argmax(np.abs(h) >= peak * 10.0 ** (-ONSET_THRESHOLD_DB / 20.0)))
    split = onset + int(round(EARLY_WINDOW_S * sample_rate_hz))
    energy = h * h
    early = float(np.sum(energy[onset:split]))
    late = float(np.sum(energy[split:]))
    if late <= 0.0:
        return C50_CLAMP_DB[1]
    return float(np.clip(10.0 * np.log10(early / late), *C50_CLAMP_DB))


def _c50_from_decay_rate(decay_db_per_s: float) -> float:
    """C50 implied by an exponential tail decaying at the given rate."""
    tau = ENERGY_DB_PER_SECOND_AT / decay_db_per_s  # amplitude time constant, s
    ratio = np.expm1(2.0 * EARLY_WINDOW_S / tau)
    return float(np.clip(10.0 * np.log10(ratio), *C50_CLAMP_DB))


def _free_decay_segments(db: np.ndarray, floor_db: float):
    """Decaying frame ranges anchored at the ends of high-energy bursts.

    A reverberant tail stays inside the VAD mask (it is still energy above
    the exit threshold), so decays are found on the energy curve itself:
    wherever burst-level energy gives way, walk back up the curve to the
    top of the decline, then extend forward while the curve keeps falling
    toward the floor. Only segments long and deep enough to carry
    decay-rate information are kept; abrupt offsets (dry recordings) fall
    through to the instant-decay path instead.
    """
    n = db.shape[0]
    burst_db = floor_db + BURST_OVER_FLOOR_DB
    stop_db = floor_db + FIT_FLOOR_MARGIN_DB
    last_end = 0
    for i in range(n - 1):
        if not (db[i] >= burst_db and db[i + 1] < burst_db):
            continue
        top = i
        while top > last_end and db[top - 1] > db[top] + WALKBACK_STEP_DB:
            top -= 1
        end = i
        while (
            end + 1 < n
            and end + 1 - top < MAX_DECAY_FRAMES
            and db[end + 1] < burst_db
            and db[end + 1] < db[end] + DECAY_BUMP_TOLERANCE_DB
            and db[end + 1] > stop_db
        ):
            end += 1
        length = end - top + 1
        if length >= MIN_DECAY_FRAMES and db[top] - db[end] >= MIN_DECAY_DROP_DB:
            yield top, end + 1
            last_end = end + 1


def estimate_c50_blind(
    clip: AudioClip, mask: np.ndarray, plan: FramePlan = DEFAULT_PLAN
) -> float:
    """Blind C50 from energy-decay slopes at speech offsets.

    Each offset's tail energies are backward-integrated (Schroeder) and a
    line is fitted to the dB curve; the fitted decay rate is converted to
    C50 under an exponential-decay assumption. The median over offsets is
    returned. Raises :class:`UndefinedAttributeError` when no offset has a
    usable decay.
    """
    powers = frame_powers(clip.samples, clip.sample_rate_hz, plan)
    n = min(powers.shape[0], mask.shape[0])
    powers, mask = powers[:n], mask[:n]
    if n == 0 or not mask.any():
        raise UndefinedAttributeError("c50_db", "no speech frames")

    db = power_db(powers)
    floor_db = float(np.percentile(db, NOISE_FLOOR_PERCENTILE))

    estimates = []
    for top, end in _free_decay_segments(db, floor_db):
        seg = powers[top:end]
        schroeder = np.cumsum(seg[::-1])[::-1]
        sdb = 10.0 * np.log10(schroeder + POWER_EPS)
        # Fit only where the backward integral dominates the truncation
        # remainder and the raw energy sits well above the noise floor.
        usable = (schroeder >= TRUNCATION_GUARD * schroeder[-1]) & (
            db[top:end] >= floor_db + FIT_OVER_FLOOR_DB
        )
        idx = np.nonzero(usable)[0]
        if idx.size < MIN_DECAY_FRAMES - 1:
            continue
        slope = float(np.polyfit(idx.astype(float), sdb[idx], 1)[0])
        if slope >= -1e-9:
            continue
        estimates.append(_c50_from_decay_rate(-slope / plan.hop_s))

    if not estimates:
        # No measurable tails: check for abrupt speech offsets (the energy
        # reaches the floor within one hop), the signature of a dry clip.
        for i in range(n - 1):
            if (
                mask[i]
                and not mask[i + 1]
                and db[i] >= floor_db + BURST_OVER_FLOOR_DB
                and db[i + 1] <= floor_db + INSTANT_DECAY_MARGIN_DB
            ):
                estimates.append(C50_CLAMP_DB[1])
                break

    if not estimates:
        raise UndefinedAttributeError("c50_db", "no usable decay regions")
    return float(np.median(estimates))
