"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field

from ..attributes import AcousticAttributes
from ..binning import AttributeLabels
from ..captions import CaptionSet
from ..records import SpeakerMetadata, StyleMetadata


class SpeakerModel(BaseModel):
    speaker_id: str = ""
    display_name: Optional[str] = None
    gender: str = "unspecified"
    age_group: str = "unspecified"
    accent: Optional[str] = None

    def to_core(self) -> SpeakerMetadata:
        return SpeakerMetadata(**self.model_dump())


class StyleModel(BaseModel):
    style: str = "unspecified"
    env_tags: list[str] = Field(default_factory=list)

    def to_core(self) -> StyleMetadata:
        return StyleMetadata(style=self.style, env_tags=tuple(self.env_tags))


class AttributesModel(BaseModel):
    f0_mean_hz: Optional[float] = None
    f0_std_hz: Optional[float] = None
    snr_db: Optional[float] = None
    c50_db: Optional[float] = None
    speaking_rate_sps: Optional[float] = None
    quality_score: Optional[float] = None
    voiced_fraction: Optional[float] = None
    speech_duration_s: float = 0.0

    @classmethod
    def from_core(cls, attrs: AcousticAttributes) -> "AttributesModel":
        return cls(**attrs.to_dict())

    def to_core(self) -> AcousticAttributes:
        return AcousticAttributes(**self.model_dump())


class LabelsModel(BaseModel):
    pitch: str
    pitch_variation: str
    reverb: str
    snr: str
    rate: str
    quality: str
    gender: str = "unspecified"
    age_group: str = "unspecified"
    accent: Optional[str] = None
    style: str = "unspecified"
    env_tags: list[str] = Field(default_factory=list)
    speaker_name: Optional[str] = None
    flagged: list[str] = Field(default_factory=list)
    config_version: str = "default-v1"

    @classmethod
    def from_core(cls, labels: AttributeLabels) -> "LabelsModel":
        return cls(**labels.to_dict())

    def to_core(self) -> AttributeLabels:
        return AttributeLabels.from_dict(self.model_dump())


class CaptionSetModel(BaseModel):
    descriptive: str
    concise: str
    attribute_robust: str
    generator: str = "template"
    rng_seed: int = 0
    robust_retained: list[str] = Field(default_factory=list)
    native: Optional[str] = None
    native_language: Optional[str] = None
    native_untranslated: bool = False
    warnings: list[str] = Field(default_factory=list)

    @classmethod
    def from_core(cls, captions: CaptionSet) -> "CaptionSetModel":
        return cls(**captions.to_dict())


class HealthResponse(BaseModel):
    status: str
    version: str


class AnnotateRequest(BaseModel):
    audio_path: str
    transcript: str
    language: str
    utterance_id: str = "adhoc"
    speaker: SpeakerModel = Field(default_factory=SpeakerModel)
    style: StyleModel = Field(default_factory=StyleModel)
    seed: int = 0
    sample_rate_hz: int = 16000
    binning_path: Optional[str] = None


class AnnotateResponse(BaseModel):
    attributes: AttributesModel
    labels: LabelsModel
    captions: CaptionSetModel
    sequence: str


class GenerateCaptionsRequest(BaseModel):
    labels: LabelsModel
    seed: int = 0


class ParseCaptionRequest(BaseModel):
    caption: str


class ParseCaptionResponse(BaseModel):
    labels: dict


class SequenceRequest(BaseModel):
    labels: LabelsModel


class SequenceResponse(BaseModel):
    sequence: str


class FitBinsRequest(BaseModel):
    samples: dict
    quantiles: Optional[list[float]] = None


class TranscriptPair(BaseModel):
    reference: str
    hypothesis: str


class CerWerRequest(BaseModel):
    pairs: list[TranscriptPair]


class CerWerResponse(BaseModel):
    cer_pct: float
    wer_pct: float
    n_pairs: int
    excluded: int


class ConfusionRequest(BaseModel):
    true_classes: list[str]
    judged_classes: list[str]
    classes: list[str]


class ConfusionResponse(BaseModel):
    classes: list[str]
    counts: list[list[int]]
    percent: list[list[float]]


class RatingModel(BaseModel):
    system: str
    utterance: str = ""
    rater: str = ""
    score: float


class MushraRequest(BaseModel):
    ratings: list[RatingModel]
    confidence: float = 0.95


class MushraAggregateModel(BaseModel):
    mean: float
    half_width: Optional[float]
    n: int


class MushraResponse(BaseModel):
    systems: dict[str, MushraAggregateModel]


class AccuracyRequest(BaseModel):
    reference: list[LabelsModel]
    candidate: list[LabelsModel]


class AccuracyResponse(BaseModel):
    per_attribute_accuracy: dict[str, float]


class AnnotateJobRequest(BaseModel):
    corpus_root: str = "."
    manifest: str = "manifest.jsonl"
    output: str = "annotated.jsonl"
    failures: Optional[str] = None
    sample_rate_hz: int = 16000
    workers: int = 1
    seed: int = 0
    binning_path: Optional[str] = None
    grammar_path: Optional[str] = None
    caption_backend: str = "template"
    translation: str = "none"
    native_language: Optional[str] = None
    estimator_adapter_cmd: Optional[str] = None
    resume: bool = False
    max_rows: Optional[int] = None


class RunReportModel(BaseModel):
    n_records: int
    n_skipped_manifest: int
    n_completed: int
    n_failed: int
    n_warnings: int
    resumed: bool
    finalized: bool
    output: str
    failures_path: Optional[str]
    wall_time_s: float


class FitBinsJobRequest(BaseModel):
    manifest: str
    output: str
    quantiles: Optional[list[float]] = None


class CaptionJobRequest(BaseModel):
    manifest: str
    output: str
    grammar_path: Optional[str] = None
    seed: int = 0


class CaptionJobResponse(BaseModel):
    n_rows: int
    output: str


class EvaluateJobRequest(BaseModel):
    reference_manifest: str
    synth_dir: Optional[str] = None
    binning_path: Optional[str] = None
    ratings_path: Optional[str] = None
    predictions_path: Optional[str] = None
    asr_path: Optional[str] = None
    emotions_path: Optional[str] = None
    metrics_path: Optional[str] = None
    sample_rate_hz: int = 16000


class EvaluationReportModel(BaseModel):
    if_bleu: Optional[float]
    per_attribute_accuracy: Optional[dict[str, float]]
    cer_pct: Optional[float]
    wer_pct: Optional[float]
    confusion: Optional[ConfusionResponse]
    mushra: Optional[dict[str, MushraAggregateModel]]
    mos: Optional[float]
    s_sim: Optional[float]
    binning_version: Optional[str]
    n_evaluated: int
    n_missing: int
    warnings: list[str]
    text: str


class StatsJobRequest(BaseModel):
    manifest: str


class StatsResponse(BaseModel):
    languages: dict
    table: list[dict]
