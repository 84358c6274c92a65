"""Core corpus record types: utterances, speaker and style metadata.

A corpus row is an :class:`UtteranceRecord`. Records are plain frozen
dataclasses so they serialize to/from JSON dicts losslessly and compare
field-by-field, which the manifest round-trip contract relies on.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, asdict

from .languages import SUPPORTED_LANGUAGES

GENDERS = frozenset({"male", "female", "unspecified"})
AGE_GROUPS = frozenset({"child", "young", "middle_aged", "elderly", "unspecified"})
STYLES = frozenset(
    {
        "neutral",
        "anger",
        "disgust",
        "fear",
        "happy",
        "sad",
        "surprise",
        "news",
        "conversational",
        "digital_command",
        "unspecified",
    }
)

# Ekman emotions plus neutral; the class set used for perceptual emotion
# confusion matrices.
EMOTION_CLASSES = ("anger", "disgust", "fear", "happy", "neutral", "sad", "surprise")

_ENV_TAG_RE = re.compile(r"^[a-z0-9_]+$")


@dataclass(frozen=True)
class SpeakerMetadata:
    speaker_id: str = ""
    display_name: str | None = None
    gender: str = "unspecified"
    age_group: str = "unspecified"
    accent: str | None = None

    def __post_init__(self):
        if self.gender not in GENDERS:
            raise ValueError(f"unknown gender {self.gender!r}")
        if self.age_group not in AGE_GROUPS:
            raise ValueError(f"unknown age_group {self.age_group!r}")
        if self.display_name and not self.speaker_id:
            raise ValueError("display_name requires a speaker_id")


@dataclass(frozen=True)
class StyleMetadata:
    style: str = "unspecified"
    env_tags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.style not in STYLES:
            raise ValueError(f"unknown style {self.style!r}")
        object.__setattr__(self, "env_tags", tuple(self.env_tags))
        for tag in self.env_tags:
            if not _ENV_TAG_RE.match(tag):
                raise ValueError(
                    f"env tag {tag!r} must be lowercase [a-z0-9_] (got {tag!r})"
                )


@dataclass(frozen=True)
class UtteranceRecord:
    utterance_id: str
    audio_ref: str
    transcript: str
    language: str
    speaker: SpeakerMetadata = field(default_factory=SpeakerMetadata)
    style: StyleMetadata = field(default_factory=StyleMetadata)
    duration_s: float | None = None

    def __post_init__(self):
        if not self.utterance_id:
            raise ValueError("utterance_id must be non-empty")
        if not self.transcript:
            raise ValueError("transcript must be non-empty")
        if self.language not in SUPPORTED_LANGUAGES:
            raise ValueError(f"unsupported language code {self.language!r}")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["speaker"]["display_name"] = self.speaker.display_name
        d["style"]["env_tags"] = list(self.style.env_tags)
        if self.duration_s is None:
            d.pop("duration_s")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "UtteranceRecord":
        speaker = d.get("speaker") or {}
        style = d.get("style") or {}
        return cls(
            utterance_id=d["utterance_id"],
            audio_ref=d["audio_ref"],
            transcript=d["transcript"],
            language=d["language"],
            speaker=SpeakerMetadata(
                speaker_id=speaker.get("speaker_id", ""),
                display_name=speaker.get("display_name"),
                gender=speaker.get("gender", "unspecified"),
                age_group=speaker.get("age_group", "unspecified"),
                accent=speaker.get("accent"),
            ),
            style=StyleMetadata(
                style=style.get("style", "unspecified"),
                env_tags=tuple(style.get("env_tags", ())),
            ),
            duration_s=d.get("duration_s"),
        )
