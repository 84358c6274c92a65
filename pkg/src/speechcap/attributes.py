"""Per-utterance acoustic attributes and the composed annotator.

Every estimator is a pure function of (samples, config): annotating the
same clip twice yields bit-identical results, which the re-annotation
evaluation depends on. Attributes that cannot be estimated are ``None``,
never zero.
"""

from __future__ import annotations

from dataclasses import dataclass, asdict

from .audio import AudioClip
from .c50 import estimate_c50_blind
from .errors import UndefinedAttributeError
from .frames import DEFAULT_PLAN, FramePlan
from .languages import syllable_count
from .pitch import estimate_f0
from .quality import estimate_quality
from .records import UtteranceRecord
from .snr import estimate_snr
from .vad import detect_speech

_FIELDS = (
    "f0_mean_hz",
    "f0_std_hz",
    "snr_db",
    "c50_db",
    "speaking_rate_sps",
    "quality_score",
    "voiced_fraction",
)


@dataclass(frozen=True)
class AcousticAttributes:
    f0_mean_hz: float | None = None
    f0_std_hz: float | None = None
    snr_db: float | None = None
    c50_db: float | None = None
    speaking_rate_sps: float | None = None
    quality_score: float | None = None
    voiced_fraction: float | None = None
    speech_duration_s: float = 0.0

    def undefined_fields(self) -> tuple[str, ...]:
        return tuple(f for f in _FIELDS if getattr(self, f) is None)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "AcousticAttributes":
        return cls(**{k: d.get(k) for k in _FIELDS}, speech_duration_s=d.get("speech_duration_s", 0.0))


def speaking_rate(transcript: str, language: str, speech_duration_s: float) -> float:
    """Syllable nuclei per second of detected speech."""
    if speech_duration_s <= 0.0:
        raise UndefinedAttributeError("speaking_rate_sps", "no detected speech")
    nuclei = syllable_count(transcript, language)
    if nuclei == 0:
        raise UndefinedAttributeError("speaking_rate_sps", "no vowel nuclei in transcript")
    return nuclei / speech_duration_s


def annotate(
    record: UtteranceRecord, clip: AudioClip, plan: FramePlan = DEFAULT_PLAN
) -> AcousticAttributes:
    """Run the full estimator chain on one utterance.

    Undefined attributes propagate as ``None``; nothing here aborts a
    batch. An all-silence clip yields every attribute undefined.
    """
    vad = detect_speech(clip, plan)
    if not vad.mask.any():
        return AcousticAttributes(speech_duration_s=0.0)

    f0 = estimate_f0(clip, vad.mask, plan)

    try:
        snr_db = estimate_snr(clip, vad.mask, plan)
    except UndefinedAttributeError:
        snr_db = None
    try:
        c50_db = estimate_c50_blind(clip, vad.mask, plan)
    except UndefinedAttributeError:
        c50_db = None
    try:
        rate = speaking_rate(record.transcript, record.language, vad.speech_duration_s)
    except UndefinedAttributeError:
        rate = None
    try:
        quality = estimate_quality(clip, snr_db, c50_db, vad.mask, plan)
    except UndefinedAttributeError:
        quality = None

    return AcousticAttributes(
        f0_mean_hz=f0.f0_mean_hz,
        f0_std_hz=f0.f0_std_hz,
        snr_db=snr_db,
        c50_db=c50_db,
        speaking_rate_sps=rate,
        quality_score=quality,
        voiced_fraction=f0.voiced_fraction,
        speech_duration_s=vad.speech_duration_s,
    )
