"""speechcap: speech corpus annotation, captioning and evaluation."""

__version__ = "0.1.0"

from .attributes import AcousticAttributes, annotate, speaking_rate
from .audio import AudioClip, load_audio
from .binning import (
    AttributeLabels,
    BinningConfig,
    DEFAULT_BINNING,
    bin_attributes,
    fit_bins,
    labels_to_sequence,
)
from .captions import CaptionSet, generate_captions, parse_caption
from .records import SpeakerMetadata, StyleMetadata, UtteranceRecord

__all__ = [
    "__version__",
    "AcousticAttributes",
    "AttributeLabels",
    "AudioClip",
    "BinningConfig",
    "CaptionSet",
    "DEFAULT_BINNING",
    "SpeakerMetadata",
    "StyleMetadata",
    "UtteranceRecord",
    "annotate",
    "bin_attributes",
    "fit_bins",
    "generate_captions",
    "labels_to_sequence",
    "load_audio",
    "parse_caption",
    "speaking_rate",
]
