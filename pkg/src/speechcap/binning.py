"""Discretization of continuous acoustic attributes into caption labels.

Bins are half-open intervals [b_i, b_{i+1}); a value exactly on a boundary
maps to the higher bin. Pitch bins are conditioned on speaker gender since
"high pitch" is population-relative. A default table ships so the system
runs without a fitting corpus; :func:`fit_bins` re-derives boundaries from
empirical quantiles of a corpus.
"""

from __future__ import annotations

import bisect
import hashlib
import json
from dataclasses import dataclass, field, asdict
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .attributes import AcousticAttributes
from .records import GENDERS, SpeakerMetadata, StyleMetadata

BINNED_ATTRIBUTES = ("pitch", "pitch_variation", "reverb", "snr", "rate", "quality")

# Maps binned attribute -> AcousticAttributes field holding its value.
ATTRIBUTE_SOURCES = {
    "pitch": "f0_mean_hz",
    "pitch_variation": "f0_std_hz",
    "reverb": "c50_db",
    "snr": "snr_db",
    "rate": "speaking_rate_sps",
    "quality": "quality_score",
}

MIN_FIT_SAMPLES = 100


@dataclass(frozen=True)
class BinSpec:
    boundaries: tuple[float, ...]
    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(float(b) for b in self.boundaries))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(self.boundaries) + 1:
            raise ValueError("label count must be boundary count + 1")
        if any(b >= c for b, c in zip(self.boundaries, self.boundaries[1:])):
            raise ValueError("boundaries must be strictly increasing")

    def label_for(self, value: float) -> str:
        return self.labels[bisect.bisect_right(self.boundaries, value)]


@dataclass(frozen=True)
class BinningConfig:
    version: str
    pitch: Mapping[str, BinSpec]  # keyed by gender
    pitch_variation: BinSpec
    reverb: BinSpec
    snr: BinSpec
    rate: BinSpec
    quality: BinSpec
    neutral_labels: Mapping[str, str]
    fallback_attributes: tuple[str, ...] = ()

    def __post_init__(self):
        missing = GENDERS - set(self.pitch)
        if missing:
            raise ValueError(f"pitch table missing genders: {sorted(missing)}")
        for attr in BINNED_ATTRIBUTES:
            neutral = self.neutral_labels.get(attr)
            if neutral is None:
                raise ValueError(f"no neutral label for {attr!r}")
            if neutral not in self.vocabulary(attr):
                raise ValueError(f"neutral label {neutral!r} not in {attr} vocabulary")

    def spec_for(self, attr: str, gender: str = "unspecified") -> BinSpec:
        if attr == "pitch":
            return self.pitch[gender]
        return getattr(self, attr)

    def vocabulary(self, attr: str) -> tuple[str, ...]:
        if attr == "pitch":
            return self.pitch["unspecified"].labels
        return getattr(self, attr).labels

    def to_json_dict(self) -> dict:
        return {
            "version": self.version,
            "pitch": {g: asdict(s) for g, s in sorted(self.pitch.items())},
            **{a: asdict(getattr(self, a)) for a in BINNED_ATTRIBUTES if a != "pitch"},
            "neutral_labels": dict(self.neutral_labels),
            "fallback_attributes": list(self.fallback_attributes),
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "BinningConfig":
        def spec(x):
            return BinSpec(tuple(x["boundaries"]), tuple(x["labels"]))

        return cls(
            version=d["version"],
            pitch={g: spec(s) for g, s in d["pitch"].items()},
            pitch_variation=spec(d["pitch_variation"]),
            reverb=spec(d["reverb"]),
            snr=spec(d["snr"]),
            rate=spec(d["rate"]),
            quality=spec(d["quality"]),
            neutral_labels=dict(d["neutral_labels"]),
            fallback_attributes=tuple(d.get("fallback_attributes", ())),
        )

    def save(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_json_dict(), indent=2, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )

    @classmethod
    def load(cls, path) -> "BinningConfig":
        return cls.from_json_dict(json.loads(Path(path).read_text(encoding="utf-8")))


PITCH_LABELS = ("very low pitch", "low pitch", "moderate pitch", "high pitch", "very high pitch")

DEFAULT_BINNING = BinningConfig(
    version="default-v1",
    pitch={
        "female": BinSpec((140.0, 180.0, 220.0, 260.0), PITCH_LABELS),
        "male": BinSpec((85.0, 115.0, 145.0, 180.0), PITCH_LABELS),
        "unspecified": BinSpec((110.0, 150.0, 195.0, 240.0), PITCH_LABELS),
    },
    pitch_variation=BinSpec((30.0,), ("monotone", "expressive tone")),
    reverb=BinSpec(
        (8.0, 18.0, 28.0, 40.0),
        (
            "very distant sounding",
            "distant sounding",
            "slightly distant sounding",
            "slightly close sounding",
            "very close sounding",
        ),
    ),
    snr=BinSpec(
        (5.0, 15.0, 25.0, 40.0),
        ("very noisy", "noisy", "slightly noisy", "clear", "very clear"),
    ),
    rate=BinSpec(
        (2.8, 4.2, 5.6, 7.0),
        ("very slow pace", "slow pace", "moderate pace", "slightly fast pace", "very fast pace"),
    ),
    quality=BinSpec(
        (2.0, 2.9, 3.7),
        ("poor speech quality", "okay speech quality", "good speech quality", "great speech quality"),
    ),
    neutral_labels={
        "pitch": "moderate pitch",
        "pitch_variation": "monotone",
        "reverb": "slightly distant sounding",
        "snr": "slightly noisy",
        "rate": "moderate pace",
        "quality": "okay speech quality",
    },
)


@dataclass(frozen=True)
class AttributeLabels:
    """Binned view of an utterance: the caption vocabulary plus metadata
    passed through verbatim."""

    pitch: str
    pitch_variation: str
    reverb: str
    snr: str
    rate: str
    quality: str
    gender: str = "unspecified"
    age_group: str = "unspecified"
    accent: str | None = None
    style: str = "unspecified"
    env_tags: tuple[str, ...] = ()
    speaker_name: str | None = None
    flagged: tuple[str, ...] = ()
    config_version: str = DEFAULT_BINNING.version

    def __post_init__(self):
        object.__setattr__(self, "env_tags", tuple(self.env_tags))
        object.__setattr__(self, "flagged", tuple(self.flagged))

    def binned(self) -> dict[str, str]:
        return {a: getattr(self, a) for a in BINNED_ATTRIBUTES}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["env_tags"] = list(self.env_tags)
        d["flagged"] = list(self.flagged)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AttributeLabels":
        return cls(
            **{a: d[a] for a in BINNED_ATTRIBUTES},
            gender=d.get("gender", "unspecified"),
            age_group=d.get("age_group", "unspecified"),
            accent=d.get("accent"),
            style=d.get("style", "unspecified"),
            env_tags=tuple(d.get("env_tags", ())),
            speaker_name=d.get("speaker_name"),
            flagged=tuple(d.get("flagged", ())),
            config_version=d.get("config_version", DEFAULT_BINNING.version),
        )


def bin_attributes(
    attrs: AcousticAttributes,
    speaker: SpeakerMetadata,
    style: StyleMetadata,
    config: BinningConfig = DEFAULT_BINNING,
) -> AttributeLabels:
    """Map continuous attributes to labels; undefined ones take the
    attribute's neutral label and are flagged."""
    values = {}
    flagged = []
    for attr in BINNED_ATTRIBUTES:
        value = getattr(attrs, ATTRIBUTE_SOURCES[attr])
        if value is None:
            values[attr] = config.neutral_labels[attr]
            flagged.append(attr)
        else:
            values[attr] = config.spec_for(attr, speaker.gender).label_for(value)
    return AttributeLabels(
        **values,
        gender=speaker.gender,
        age_group=speaker.age_group,
        accent=speaker.accent,
        style=style.style,
        env_tags=style.env_tags,
        speaker_name=speaker.display_name,
        flagged=tuple(flagged),
        config_version=config.version,
    )


SEQUENCE_ORDER = ("gender", "pitch", "pitch_variation", "reverb", "snr", "rate", "quality", "style")


def labels_to_sequence(labels: AttributeLabels) -> str:
    """Canonical comma-separated token sequence, used for adherence BLEU."""
    return ", ".join(getattr(labels, f) for f in SEQUENCE_ORDER)


def _quantiles_for(spec: BinSpec, quantiles: Sequence[float] | None) -> np.ndarray:
    needed = len(spec.labels) - 1
    if quantiles is not None and len(quantiles) == needed:
        q = np.asarray(quantiles, dtype=float)
        if np.any(q <= 0) or np.any(q >= 1) or np.any(np.diff(q) <= 0):
            raise ValueError("quantiles must be strictly increasing in (0, 1)")
        return q
    return np.linspace(0.0, 1.0, needed + 2)[1:-1]


def _fit_spec(values, spec: BinSpec, quantiles) -> BinSpec | None:
    arr = np.asarray([v for v in values if v is not None], dtype=float)
    arr = arr[np.isfinite(arr)]
    if arr.size < MIN_FIT_SAMPLES:
        return None
    bounds = np.quantile(arr, _quantiles_for(spec, quantiles))
    if np.any(np.diff(bounds) <= 0):
        return None  # degenerate sample distribution
    return BinSpec(tuple(bounds), spec.labels)


def fit_bins(
    attribute_samples: Mapping[str, object],
    quantiles: Sequence[float] | None = None,
    base: BinningConfig = DEFAULT_BINNING,
    version: str | None = None,
) -> BinningConfig:
    """Fit bin boundaries at empirical quantiles of a sample corpus.

    ``attribute_samples`` maps each binned attribute to its value
    collection; ``pitch`` maps gender to a collection. Attributes with
    fewer than MIN_FIT_SAMPLES defined samples, or with degenerate
    quantiles, keep the base table and are listed in
    ``fallback_attributes``.
    """
    fallback = []
    pitch = {}
    pitch_samples = attribute_samples.get("pitch") or {}
    if not isinstance(pitch_samples, Mapping):
        raise TypeError("pitch samples must map gender to value collections")
    for gender in GENDERS:
        fitted = _fit_spec(pitch_samples.get(gender, ()), base.pitch[gender], quantiles)
        if fitted is None:
            pitch[gender] = base.pitch[gender]
            fallback.append(f"pitch.{gender}")
        else:
            pitch[gender] = fitted

    others = {}
    for attr in BINNED_ATTRIBUTES:
        if attr == "pitch":
            continue
        fitted = _fit_spec(attribute_samples.get(attr, ()), base.spec_for(attr), quantiles)
        if fitted is None:
            others[attr] = base.spec_for(attr)
            fallback.append(attr)
        else:
            others[attr] = fitted

    if version is None:
        digest = hashlib.sha256(
            json.dumps(
                {g: pitch[g].boundaries for g in sorted(pitch)}
                | {a: others[a].boundaries for a in sorted(others)},
                sort_keys=True,
            ).encode()
        ).hexdigest()[:10]
        version = f"fitted-{digest}"

    return BinningConfig(
        version=version,
        pitch=pitch,
        neutral_labels=dict(base.neutral_labels),
        fallback_attributes=tuple(fallback),
        **others,
    )
