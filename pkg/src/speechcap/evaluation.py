"""Automatic evaluation: adherence BLEU by re-annotation, per-attribute
accuracy, CER/WER, confusion aggregation and MUSHRA aggregation."""

from __future__ import annotations

import math
import unicodedata
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats as scipy_stats

from .attributes import annotate
from .audio import AudioClip
from .binning import (
    BINNED_ATTRIBUTES,
    SEQUENCE_ORDER,
    AttributeLabels,
    BinningConfig,
    bin_attributes,
)
from .bleu import corpus_bleu
from .errors import ConfigVersionError
from .frames import DEFAULT_PLAN, FramePlan
from .records import SpeakerMetadata, StyleMetadata, UtteranceRecord


# --------------------------------------------------------------------------
# Edit distance (CER / WER)
# --------------------------------------------------------------------------

def levenshtein(a: Sequence, b: Sequence) -> int:
    """Edit distance with unit costs, two-row dynamic programming."""
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    previous = np.arange(len(b) + 1, dtype=np.int64)
    current = np.empty_like(previous)
    for i, ai in enumerate(a, start=1):
        current[0] = i
        sub = previous[:-1] + np.asarray([ai != bj for bj in b], dtype=np.int64)
        for j in range(1, len(b) + 1):
            current[j] = min(sub[j - 1], previous[j] + 1, current[j - 1] + 1)
        previous, current = current, previous
    return int(previous[len(b)])


def normalize_text(text: str) -> str:
    """Canonical composition, trimmed, internal whitespace collapsed."""
    text = unicodedata.normalize("NFC", text)
    return " ".join(text.split())


@dataclass(frozen=True)
class CerWerResult:
    cer_pct: float
    wer_pct: float
    n_pairs: int
    excluded: int

    def as_tuple(self) -> tuple[float, float]:
        return (self.cer_pct, self.wer_pct)


def cer_wer(
    reference_transcripts: Sequence[str], hypothesis_transcripts: Sequence[str]
) -> CerWerResult:
    """Corpus CER/WER: summed edits over summed reference lengths, in %.

    Pairs with an empty reference are excluded (reported in ``excluded``).
    """
    if len(reference_transcripts) != len(hypothesis_transcripts):
        raise ValueError("reference/hypothesis count mismatch")
    char_edits = char_total = word_edits = word_total = 0
    excluded = 0
    n_pairs = 0
    for ref, hyp in zip(reference_transcripts, hypothesis_transcripts):
        ref = normalize_text(ref)
        hyp = normalize_text(hyp)
        if not ref:
            excluded += 1
            continue
        n_pairs += 1
        char_edits += levenshtein(ref, hyp)
        char_total += len(ref)
        ref_words = ref.split()
        word_edits += levenshtein(ref_words, hyp.split())
        word_total += len(ref_words)
    if n_pairs == 0:
        raise ValueError("no usable reference/hypothesis pairs")
    return CerWerResult(
        cer_pct=100.0 * char_edits / char_total,
        wer_pct=100.0 * word_edits / word_total,
        n_pairs=n_pairs,
        excluded=excluded,
    )


# --------------------------------------------------------------------------
# Confusion matrix
# --------------------------------------------------------------------------

def _round_row_percent(counts_row: Sequence[int]) -> list[float]:
    """Row percentages rounded to 2 decimals, sum-preserving.

    Works in 0.01 units: floor everything, then distribute the residual
    to the cells with the largest remainders (ties broken by column
    order), so every non-empty row sums to exactly 100.00.
    """
    total = sum(counts_row)
    if total == 0:
        return [0.0] * len(counts_row)
    units = [c / total * 10000.0 for c in counts_row]
    floored = [math.floor(u + 1e-9) for u in units]
    remainders = [u - f for u, f in zip(units, floored)]
    residual = 10000 - sum(floored)
    order = sorted(range(len(counts_row)), key=lambda i: (-remainders[i], i))
    for k in range(residual):
        floored[order[k % len(counts_row)]] += 1
    return [f / 100.0 for f in floored]


@dataclass(frozen=True)
class ConfusionMatrix:
    classes: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]
    percent: tuple[tuple[float, ...], ...]  # row-stochastic, 2 decimals

    def cell(self, true_class: str, judged_class: str) -> float:
        i = self.classes.index(true_class)
        j = self.classes.index(judged_class)
        return self.percent[i][j]

    def to_json_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "counts": [list(r) for r in self.counts],
            "percent": [list(r) for r in self.percent],
        }


def confusion_matrix(
    true_classes: Sequence[str],
    judged_classes: Sequence[str],
    classes: Sequence[str],
) -> ConfusionMatrix:
    """Row = true class, column = judged class, rows normalized to percent."""
    if len(true_classes) != len(judged_classes):
        raise ValueError("true/judged length mismatch")
    index = {c: i for i, c in enumerate(classes)}
    counts = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for t, j in zip(true_classes, judged_classes):
        if t not in index:
            raise ValueError(f"unseen true class label {t!r}")
        if j not in index:
            raise ValueError(f"unseen judged class label {j!r}")
        counts[index[t], index[j]] += 1
    percent = tuple(tuple(_round_row_percent(row)) for row in counts.tolist())
    return ConfusionMatrix(
        classes=tuple(classes),
        counts=tuple(tuple(r) for r in counts.tolist()),
        percent=percent,
    )


# --------------------------------------------------------------------------
# MUSHRA aggregation
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Rating:
    system: str
    utterance: str
    rater: str
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 100.0:
            raise ValueError(f"rating {self.score} outside [0, 100]")


@dataclass(frozen=True)
class MushraAggregate:
    mean: float
    half_width: float | None  # t-based confidence half-width; None when n < 2
    n: int


def mushra_aggregate(
    ratings: Iterable[Rating], confidence: float = 0.95
) -> dict[str, MushraAggregate]:
    """Per-system mean and confidence half-width t_(n-1) * s / sqrt(n).

    Order-independent: ratings may arrive in any permutation.
    """
    by_system: dict[str, list[float]] = {}
    for r in ratings:
        by_system.setdefault(r.system, []).append(r.score)
    out: dict[str, MushraAggregate] = {}
    for system in sorted(by_system):
        scores = np.asarray(sorted(by_system[system]), dtype=float)
        n = scores.size
        mean = float(np.mean(scores))
        if n < 2:
            out[system] = MushraAggregate(mean=mean, half_width=None, n=n)
            continue
        s = float(np.std(scores, ddof=1))
        t_crit = float(scipy_stats.t.ppf(0.5 + confidence / 2.0, n - 1))
        out[system] = MushraAggregate(
            mean=mean, half_width=t_crit * s / math.sqrt(n), n=n
        )
    return out


# --------------------------------------------------------------------------
# Label comparison: adherence BLEU and per-attribute accuracy
# --------------------------------------------------------------------------

def sequence_tokens(labels: AttributeLabels) -> list[str]:
    return [getattr(labels, f) for f in SEQUENCE_ORDER]


def _check_versions(labels: Sequence[AttributeLabels], expected: str, who: str) -> None:
    for lab in labels:
        if lab.config_version != expected:
            raise ConfigVersionError(expected, lab.config_version)


@dataclass(frozen=True)
class SynthesizedUtterance:
    clip: AudioClip
    transcript: str
    language: str


@dataclass(frozen=True)
class IfBleuResult:
    if_bleu: float
    candidate_labels: tuple[AttributeLabels, ...]


def reannotate_labels(
    reference: AttributeLabels,
    synthesized: SynthesizedUtterance,
    config: BinningConfig,
    plan: FramePlan = DEFAULT_PLAN,
) -> AttributeLabels:
    """Re-run the acoustic pipeline on a synthesized clip and bin under the
    reference's categorical metadata."""
    record = UtteranceRecord(
        utterance_id="synthesized",
        audio_ref="synthesized",
        transcript=synthesized.transcript,
        language=synthesized.language,
        speaker=SpeakerMetadata(
            speaker_id=reference.speaker_name or "synthesized",
            display_name=reference.speaker_name,
            gender=reference.gender,
            age_group=reference.age_group,
            accent=reference.accent,
        ),
        style=StyleMetadata(style=reference.style, env_tags=reference.env_tags),
    )
    attrs = annotate(record, synthesized.clip, plan)
    return bin_attributes(attrs, record.speaker, record.style, config)


def if_bleu(
    reference_labels: Sequence[AttributeLabels],
    synthesized: Sequence[SynthesizedUtterance],
    config: BinningConfig,
    plan: FramePlan = DEFAULT_PLAN,
) -> IfBleuResult:
    """Adherence BLEU: re-annotate, bin, compare canonical sequences.

    Undefined attributes in a candidate fall to the flagged neutral label,
    penalizing the score without aborting.
    """
    if len(reference_labels) != len(synthesized):
        raise ValueError(
            f"reference/synthesized count mismatch: "
            f"{len(reference_labels)} vs {len(synthesized)}"
        )
    _check_versions(reference_labels, config.version, "reference")
    candidates = tuple(
        reannotate_labels(ref, synth, config, plan)
        for ref, synth in zip(reference_labels, synthesized)
    )
    score = corpus_bleu(
        [sequence_tokens(c) for c in candidates],
        [sequence_tokens(r) for r in reference_labels],
    )
    return IfBleuResult(if_bleu=score, candidate_labels=candidates)


def attribute_accuracy(
    reference_labels: Sequence[AttributeLabels],
    candidate_labels: Sequence[AttributeLabels],
) -> dict[str, float]:
    """Exact-match percentage per binned attribute."""
    if len(reference_labels) != len(candidate_labels):
        raise ValueError("reference/candidate count mismatch")
    if not reference_labels:
        raise ValueError("empty label sequences")
    expected = reference_labels[0].config_version
    _check_versions(reference_labels, expected, "reference")
    _check_versions(candidate_labels, expected, "candidate")
    out = {}
    for attr in BINNED_ATTRIBUTES:
        hits = sum(
            1
            for r, c in zip(reference_labels, candidate_labels)
            if getattr(r, attr) == getattr(c, attr)
        )
        out[attr] = 100.0 * hits / len(reference_labels)
    return out


# --------------------------------------------------------------------------
# Consolidated report
# --------------------------------------------------------------------------

@dataclass
class EvaluationReport:
    if_bleu: float | None = None
    per_attribute_accuracy: dict[str, float] | None = None
    cer_pct: float | None = None
    wer_pct: float | None = None
    confusion: ConfusionMatrix | None = None
    mushra: dict[str, MushraAggregate] | None = None
    mos: float | None = None  # ingested from an external adapter, never computed
    s_sim: float | None = None  # ingested from an external adapter, never computed
    binning_version: str | None = None
    n_evaluated: int = 0
    n_missing: int = 0
    warnings: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        d = {
            "if_bleu": self.if_bleu,
            "per_attribute_accuracy": self.per_attribute_accuracy,
            "cer_pct": self.cer_pct,
            "wer_pct": self.wer_pct,
            "confusion": self.confusion.to_json_dict() if self.confusion else None,
            "mushra": {
                s: {"mean": a.mean, "half_width": a.half_width, "n": a.n}
                for s, a in (self.mushra or {}).items()
            }
            or None,
            "mos": self.mos,
            "s_sim": self.s_sim,
            "binning_version": self.binning_version,
            "n_evaluated": self.n_evaluated,
            "n_missing": self.n_missing,
            "warnings": list(self.warnings),
        }
        return d

    def render_text(self) -> str:
        """Human-readable summary tables."""
        lines = ["== automatic evaluation =="]
        header = []
        values = []
        for name, value in (
            ("CER (%)", self.cer_pct),
            ("WER (%)", self.wer_pct),
            ("MOS", self.mos),
            ("S-SIM", self.s_sim),
            ("IF-BLEU", self.if_bleu),
        ):
            if value is not None:
                header.append(f"{name:>10}")
                values.append(f"{value:>10.2f}")
        if header:
            lines += ["  ".join(header), "  ".join(values)]
        if self.per_attribute_accuracy:
            lines.append("")
            lines.append("== per-attribute accuracy (%) ==")
            attrs = list(self.per_attribute_accuracy)
            lines.append("  ".join(f"{a:>16}" for a in attrs))
            lines.append(
                "  ".join(f"{self.per_attribute_accuracy[a]:>16.2f}" for a in attrs)
            )
        if self.mushra:
            lines.append("")
            lines.append("== listening-test aggregates ==")
            for system, agg in self.mushra.items():
                hw = f" +/- {agg.half_width:.1f}" if agg.half_width is not None else ""
                lines.append(f"{system:>16}: {agg.mean:.1f}{hw}  (n={agg.n})")
        if self.confusion:
            lines.append("")
            lines.append("== confusion (%) ==")
            classes = self.confusion.classes
            width = max(len(c) for c in classes) + 2
            lines.append(" " * width + "".join(f"{c:>{width}}" for c in classes))
            for cls, row in zip(classes, self.confusion.percent):
                lines.append(
                    f"{cls:>{width}}" + "".join(f"{v:>{width}.2f}" for v in row)
                )
        if self.n_missing:
            lines.append("")
            lines.append(f"missing synthesized clips: {self.n_missing}")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        return "\n".join(lines)
