"""Batch orchestration: corpus-wide annotation with parallel workers,
checkpoint/resume, per-utterance failure isolation, plus corpus stats and
the consolidated evaluation run.

Determinism contract: with a fixed config, corpus and seed the finalized
manifest is byte-identical regardless of worker count, completion order or
crash/resume, because every per-utterance result is a pure function of the
record and the finalize step sorts rows canonically by utterance id.

Crash safety: rows append to ``<output>.partial.jsonl`` and completed ids
to ``<output>.ckpt.jsonl`` (first line carries the config fingerprint),
each flushed after write. A torn final line in either file is discarded on
resume and the row is simply recomputed.
"""

from __future__ import annotations

import hashlib
import json
import multiprocessing
import os
import shlex
import subprocess
import time
from dataclasses import dataclass, field, asdict, replace
from pathlib import Path

from .attributes import AcousticAttributes, annotate
from .audio import load_audio
from .backends import (
    HttpLlmBackend,
    HttpTranslationBackend,
    StubTranslationBackend,
    llm_generate_captions,
    translate_caption,
)
from .binning import (
    ATTRIBUTE_SOURCES,
    BINNED_ATTRIBUTES,
    AttributeLabels,
    BinningConfig,
    DEFAULT_BINNING,
    bin_attributes,
    fit_bins,
)
from .captions import CaptionSet, generate_captions
from .errors import (
    BackendError,
    CheckpointMismatchError,
    PipelineConfigError,
    SpeechCapError,
)
from .evaluation import (
    EvaluationReport,
    Rating,
    SynthesizedUtterance,
    attribute_accuracy,
    cer_wer,
    confusion_matrix,
    if_bleu,
    mushra_aggregate,
)
from .grammar import DEFAULT_GRAMMAR, TemplateGrammar
from .manifest import (
    annotated_row_from_dict,
    annotated_row_to_dict,
    dump_row,
    read_jsonl,
    read_manifest,
    write_jsonl,
)
from .records import EMOTION_CLASSES, UtteranceRecord

CAPTION_BACKENDS = ("template", "llm")
TRANSLATION_MODES = ("none", "stub", "http")


@dataclass
class PipelineConfig:
    corpus_root: str = "."
    manifest: str = "manifest.jsonl"
    output: str = "annotated.jsonl"
    failures: str | None = None
    sample_rate_hz: int = 16000
    workers: int = 1
    seed: int = 0
    binning_path: str | None = None
    grammar_path: str | None = None
    caption_backend: str = "template"
    translation: str = "none"
    native_language: str | None = None  # None = the utterance's own language
    estimator_adapter_cmd: str | None = None

    @classmethod
    def load(cls, path, overrides: dict | None = None) -> "PipelineConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise PipelineConfigError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise PipelineConfigError(f"config {path} is not valid JSON: {exc}") from exc
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise PipelineConfigError(f"unknown config keys: {sorted(unknown)}")
        if overrides:
            data.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**data)

    def resolve(self, p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else Path(self.corpus_root) / p

    def validate(self) -> None:
        if self.workers < 1:
            raise PipelineConfigError("workers must be >= 1")
        if self.caption_backend not in CAPTION_BACKENDS:
            raise PipelineConfigError(f"caption_backend must be one of {CAPTION_BACKENDS}")
        if self.translation not in TRANSLATION_MODES:
            raise PipelineConfigError(f"translation must be one of {TRANSLATION_MODES}")
        if not self.resolve(self.manifest).exists():
            raise PipelineConfigError(f"manifest not found: {self.resolve(self.manifest)}")
        for label, p in (("binning_path", self.binning_path), ("grammar_path", self.grammar_path)):
            if p is not None and not self.resolve(p).exists():
                raise PipelineConfigError(f"{label} not found: {self.resolve(p)}")

    def load_binning(self) -> BinningConfig:
        if self.binning_path is None:
            return DEFAULT_BINNING
        return BinningConfig.load(self.resolve(self.binning_path))

    def load_grammar(self) -> TemplateGrammar:
        if self.grammar_path is None:
            return DEFAULT_GRAMMAR
        return TemplateGrammar.load(self.resolve(self.grammar_path))


def derive_seed(global_seed: int, utterance_id: str) -> int:
    """Stable per-utterance caption seed, independent of scheduling."""
    digest = hashlib.sha256(f"{global_seed}:{utterance_id}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def config_fingerprint(config: PipelineConfig, binning: BinningConfig, grammar: TemplateGrammar) -> str:
    manifest_path = config.resolve(config.manifest)
    h = hashlib.sha256()
    h.update(
        json.dumps(
            {
                "sample_rate_hz": config.sample_rate_hz,
                "seed": config.seed,
                "caption_backend": config.caption_backend,
                "translation": config.translation,
                "native_language": config.native_language,
                "estimator_adapter_cmd": config.estimator_adapter_cmd,
                "binning_version": binning.version,
                "grammar_version": grammar.version,
            },
            sort_keys=True,
        ).encode()
    )
    h.update(manifest_path.read_bytes())
    return h.hexdigest()


@dataclass
class RunReport:
    n_records: int = 0
    n_skipped_manifest: int = 0
    n_completed: int = 0
    n_failed: int = 0
    n_warnings: int = 0
    resumed: bool = False
    finalized: bool = True
    output: str = ""
    failures_path: str | None = None
    wall_time_s: float = 0.0

    def to_json_dict(self) -> dict:
        return asdict(self)


# --------------------------------------------------------------------------
# Worker side
# --------------------------------------------------------------------------

_WORKER: dict = {}


def _init_worker(ctx: dict) -> None:
    _WORKER.clear()
    _WORKER["corpus_root"] = ctx["corpus_root"]
    _WORKER["sample_rate_hz"] = ctx["sample_rate_hz"]
    _WORKER["seed"] = ctx["seed"]
    _WORKER["binning"] = BinningConfig.from_json_dict(ctx["binning"])
    _WORKER["grammar"] = TemplateGrammar.from_json_dict(ctx["grammar"])
    _WORKER["caption_backend"] = ctx["caption_backend"]
    _WORKER["translation"] = ctx["translation"]
    _WORKER["native_language"] = ctx["native_language"]
    _WORKER["adapter_attrs"] = ctx["adapter_attrs"]


_ADAPTER_BOUNDS = {
    "f0_mean_hz": (50.0, 600.0),
    "f0_std_hz": (0.0, float("inf")),
    "snr_db": (-10.0, 60.0),
    "c50_db": (-10.0, 60.0),
    "speaking_rate_sps": (0.0, float("inf")),
    "quality_score": (1.0, 4.5),
    "voiced_fraction": (0.0, 1.0),
}


def _attrs_from_adapter(row: dict) -> AcousticAttributes:
    """Adapter outputs must satisfy the same invariants as internal ones."""
    kwargs = {}
    for name, (lo, hi) in _ADAPTER_BOUNDS.items():
        value = row.get(name)
        if value is not None:
            value = float(value)
            if not lo <= value <= hi:
                raise ValueError(f"adapter {name}={value} outside [{lo}, {hi}]")
        kwargs[name] = value
    duration = float(row.get("speech_duration_s", 0.0))
    if duration < 0:
        raise ValueError("adapter speech_duration_s negative")
    return AcousticAttributes(**kwargs, speech_duration_s=duration)


def _process_record(record_dict: dict) -> dict:
    """Pure per-utterance pipeline: load, annotate, bin, caption."""
    uid = record_dict["utterance_id"]
    failures: list[dict] = []
    try:
        record = UtteranceRecord.from_dict(record_dict)
        audio_path = Path(record.audio_ref)
        if not audio_path.is_absolute():
            audio_path = Path(_WORKER["corpus_root"]) / audio_path
        clip = load_audio(audio_path, _WORKER["sample_rate_hz"])

        adapter_row = _WORKER["adapter_attrs"].get(uid)
        if adapter_row is not None:
            attrs = _attrs_from_adapter(adapter_row)
        else:
            attrs = annotate(record, clip)

        labels = bin_attributes(attrs, record.speaker, record.style, _WORKER["binning"])
        seed = derive_seed(_WORKER["seed"], uid)
        if _WORKER["caption_backend"] == "llm":
            captions = llm_generate_captions(labels, HttpLlmBackend(), _WORKER["grammar"], seed)
        else:
            captions = generate_captions(labels, _WORKER["grammar"], seed)

        mode = _WORKER["translation"]
        if mode != "none":
            target = _WORKER["native_language"] or record.language
            try:
                backend = StubTranslationBackend() if mode == "stub" else HttpTranslationBackend()
                native = translate_caption(captions.descriptive, target, backend)
                captions = replace(
                    captions,
                    native=native.text,
                    native_language=native.language,
                    native_untranslated=native.untranslated,
                )
            except BackendError as exc:
                failures.append(
                    {"utterance_id": uid, "stage": "translate", "error": str(exc), "fatal": False}
                )

        record = replace(record, duration_s=clip.duration_s)
        row = annotated_row_to_dict(record, attrs, labels, captions)
        return {"uid": uid, "row": dump_row(row), "failures": failures}
    except Exception as exc:  # isolate per utterance, never abort the batch
        failures.append(
            {"utterance_id": uid, "stage": "annotate", "error": f"{type(exc).__name__}: {exc}", "fatal": True}
        )
        return {"uid": uid, "row": None, "failures": failures}


# --------------------------------------------------------------------------
# Checkpointing
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Checkpoint:
    fingerprint: str
    completed: frozenset[str]


def _partial_path(output: Path) -> Path:
    return output.with_name(output.name + ".partial.jsonl")


def _ckpt_path(output: Path) -> Path:
    return output.with_name(output.name + ".ckpt.jsonl")


def _load_checkpoint(ckpt_file: Path) -> Checkpoint | None:
    if not ckpt_file.exists():
        return None
    fingerprint = None
    completed = set()
    for line in ckpt_file.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError:
            continue  # torn tail line
        if fingerprint is None and "fingerprint" in row:
            fingerprint = row["fingerprint"]
        elif "done" in row:
            completed.add(row["done"])
    if fingerprint is None:
        return None
    return Checkpoint(fingerprint=fingerprint, completed=frozenset(completed))


def _load_partial_rows(partial_file: Path) -> dict[str, str]:
    """Parseable partial rows keyed by utterance id (torn lines dropped)."""
    rows: dict[str, str] = {}
    if not partial_file.exists():
        return rows
    for line in partial_file.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        try:
            row = json.loads(line)
            uid = row["utterance_id"]
        except (json.JSONDecodeError, KeyError, TypeError):
            continue
        rows.setdefault(uid, line)
    return rows


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


# --------------------------------------------------------------------------
# run_annotate
# --------------------------------------------------------------------------

def _run_estimator_adapter(cmd: str, records, workdir: Path) -> dict[str, dict]:
    in_path = workdir / "adapter_input.jsonl"
    out_path = workdir / "adapter_output.jsonl"
    write_jsonl([r.to_dict() for r in records], in_path)
    argv = shlex.split(cmd) + [str(in_path), str(out_path)]
    proc = subprocess.run(argv, capture_output=True, text=True, timeout=3600)
    if proc.returncode != 0:
        raise PipelineConfigError(
            f"estimator adapter failed ({proc.returncode}): {proc.stderr.strip()[:500]}"
        )
    return {row["utterance_id"]: row for row in read_jsonl(out_path)}


def run_annotate(config: PipelineConfig, resume: bool = False, max_rows: int | None = None) -> RunReport:
    """Annotate a corpus end to end; resumable and failure-isolated.

    ``max_rows`` stops after that many newly completed rows, leaving a
    valid checkpoint behind (partial runs / crash drills).
    """
    t0 = time.monotonic()
    config.validate()
    binning = config.load_binning()
    grammar = config.load_grammar()
    grammar.validate()

    manifest_read = read_manifest(config.resolve(config.manifest))
    records = manifest_read.records

    output = config.resolve(config.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    partial_file = _partial_path(output)
    ckpt_file = _ckpt_path(output)
    fingerprint = config_fingerprint(config, binning, grammar)

    completed_rows: dict[str, str] = {}
    resumed = False
    if resume:
        ckpt = _load_checkpoint(ckpt_file)
        if ckpt is not None:
            if ckpt.fingerprint != fingerprint:
                raise CheckpointMismatchError(
                    "checkpoint was written under a different config; refusing to resume"
                )
            partial_rows = _load_partial_rows(partial_file)
            completed_rows = {u: partial_rows[u] for u in ckpt.completed if u in partial_rows}
            resumed = True
    else:
        for stale in (partial_file, ckpt_file):
            if stale.exists():
                stale.unlink()

    # Rewrite the surviving rows so both files are clean before appending.
    _atomic_write(partial_file, "".join(line + "\n" for line in completed_rows.values()))
    ckpt_lines = [json.dumps({"fingerprint": fingerprint})]
    ckpt_lines += [json.dumps({"done": u}) for u in completed_rows]
    _atomic_write(ckpt_file, "".join(line + "\n" for line in ckpt_lines))

    pending = [r for r in records if r.utterance_id not in completed_rows]

    adapter_attrs: dict[str, dict] = {}
    if config.estimator_adapter_cmd:
        adapter_attrs = _run_estimator_adapter(
            config.estimator_adapter_cmd, pending, output.parent
        )

    ctx = {
        "corpus_root": str(config.corpus_root),
        "sample_rate_hz": config.sample_rate_hz,
        "seed": config.seed,
        "binning": binning.to_json_dict(),
        "grammar": grammar.to_json_dict(),
        "caption_backend": config.caption_backend,
        "translation": config.translation,
        "native_language": config.native_language,
        "adapter_attrs": adapter_attrs,
    }

    failures: list[dict] = []
    n_new = 0
    stopped_early = False

    def handle(result: dict, partial_fh, ckpt_fh) -> bool:
        nonlocal n_new
        failures.extend(result["failures"])
        if result["row"] is not None:
            partial_fh.write(result["row"] + "\n")
            partial_fh.flush()
            ckpt_fh.write(json.dumps({"done": result["uid"]}) + "\n")
            ckpt_fh.flush()
            n_new += 1
        return max_rows is not None and n_new >= max_rows

    with partial_file.open("a", encoding="utf-8") as partial_fh, ckpt_file.open(
        "a", encoding="utf-8"
    ) as ckpt_fh:
        task_dicts = [r.to_dict() for r in pending]
        if config.workers == 1 or len(task_dicts) <= 1:
            _init_worker(ctx)
            for task in task_dicts:
                if handle(_process_record(task), partial_fh, ckpt_fh):
                    stopped_early = True
                    break
        else:
            with multiprocessing.Pool(
                config.workers, initializer=_init_worker, initargs=(ctx,)
            ) as pool:
                for result in pool.imap_unordered(_process_record, task_dicts, chunksize=4):
                    if handle(result, partial_fh, ckpt_fh):
                        stopped_early = True
                        pool.terminate()
                        break

    report = RunReport(
        n_records=len(records),
        n_skipped_manifest=manifest_read.skipped_count,
        n_failed=sum(1 for f in failures if f.get("fatal")),
        n_warnings=sum(1 for f in failures if not f.get("fatal")),
        resumed=resumed,
        output=str(output),
        wall_time_s=time.monotonic() - t0,
    )

    failures_path = (
        config.resolve(config.failures)
        if config.failures
        else output.with_name(output.name + ".failures.jsonl")
    )

    if stopped_early:
        report.finalized = False
        report.n_completed = n_new + (len(records) - len(pending))
        if failures:
            write_jsonl(sorted(failures, key=lambda f: f["utterance_id"]), failures_path)
            report.failures_path = str(failures_path)
        return report

    # Finalize: canonical sort decouples output bytes from scheduling.
    final_rows = _load_partial_rows(partial_file)
    _atomic_write(
        output, "".join(final_rows[u] + "\n" for u in sorted(final_rows))
    )
    partial_file.unlink(missing_ok=True)
    ckpt_file.unlink(missing_ok=True)

    report.n_completed = len(final_rows)
    report.wall_time_s = time.monotonic() - t0
    if failures:
        write_jsonl(sorted(failures, key=lambda f: f["utterance_id"]), failures_path)
        report.failures_path = str(failures_path)
    return report


# --------------------------------------------------------------------------
# fit-bins and caption regeneration over annotated manifests
# --------------------------------------------------------------------------

def collect_attribute_samples(annotated_rows) -> dict:
    samples: dict = {"pitch": {"female": [], "male": [], "unspecified": []}}
    for attr in BINNED_ATTRIBUTES:
        if attr != "pitch":
            samples[attr] = []
    for record, attrs, labels, _captions in annotated_rows:
        for attr in BINNED_ATTRIBUTES:
            value = getattr(attrs, ATTRIBUTE_SOURCES[attr])
            if value is None:
                continue
            if attr == "pitch":
                samples["pitch"][record.speaker.gender].append(value)
            else:
                samples[attr].append(value)
    return samples


def run_fit_bins(
    annotated_manifest,
    output_path,
    quantiles=None,
    base: BinningConfig = DEFAULT_BINNING,
) -> BinningConfig:
    from .manifest import read_annotated_manifest

    rows, _skipped = read_annotated_manifest(annotated_manifest)
    fitted = fit_bins(collect_attribute_samples(rows), quantiles=quantiles, base=base)
    fitted.save(output_path)
    return fitted


def run_caption(
    annotated_manifest,
    output_path,
    grammar: TemplateGrammar = DEFAULT_GRAMMAR,
    seed: int = 0,
) -> int:
    """Regenerate captions for an annotated manifest; returns row count."""
    from .manifest import read_annotated_manifest

    rows, _skipped = read_annotated_manifest(annotated_manifest)
    out_lines = []
    for record, attrs, labels, _old in rows:
        captions = generate_captions(labels, grammar, derive_seed(seed, record.utterance_id))
        out_lines.append(dump_row(annotated_row_to_dict(record, attrs, labels, captions)))
    _atomic_write(Path(output_path), "".join(line + "\n" for line in out_lines))
    return len(out_lines)


# --------------------------------------------------------------------------
# run_stats
# --------------------------------------------------------------------------

@dataclass
class LanguageStats:
    utterances: int = 0
    hours: float = 0.0
    label_histograms: dict = field(default_factory=dict)
    style_histogram: dict = field(default_factory=dict)


@dataclass
class StatsReport:
    languages: dict[str, LanguageStats] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            lang: {
                "utterances": s.utterances,
                "hours": s.hours,
                "label_histograms": s.label_histograms,
                "style_histogram": s.style_histogram,
            }
            for lang, s in sorted(self.languages.items())
        }

    def to_table_rows(self) -> list[dict]:
        """Plot-ready flat table: one row per language."""
        return [
            {"language": lang, "utterances": s.utterances, "hours": round(s.hours, 4)}
            for lang, s in sorted(self.languages.items())
        ]


def run_stats(manifest_path) -> StatsReport:
    """Per-language durations and label distributions for a manifest.

    Accepts plain or annotated manifests; rows missing annotations still
    count toward utterances/hours.
    """
    report = StatsReport()
    for row in read_jsonl(manifest_path):
        lang = row.get("language")
        if not lang:
            continue
        stats = report.languages.setdefault(lang, LanguageStats())
        stats.utterances += 1
        duration = row.get("duration_s")
        if duration:
            stats.hours += float(duration) / 3600.0
        labels = row.get("labels") or {}
        for attr in BINNED_ATTRIBUTES:
            label = labels.get(attr)
            if label:
                hist = stats.label_histograms.setdefault(attr, {})
                hist[label] = hist.get(label, 0) + 1
        style = (row.get("style") or {}).get("style")
        if style:
            stats.style_histogram[style] = stats.style_histogram.get(style, 0) + 1
    return report


# --------------------------------------------------------------------------
# run_evaluate
# --------------------------------------------------------------------------

def run_evaluate(
    reference_manifest,
    synth_dir=None,
    binning: BinningConfig | None = None,
    ratings_path=None,
    predictions_path=None,
    asr_path=None,
    emotions_path=None,
    metrics_path=None,
    emotion_classes=EMOTION_CLASSES,
    sample_rate_hz: int = 16000,
) -> EvaluationReport:
    """Consolidated evaluation against an annotated reference manifest.

    Sections are optional: absent inputs are skipped with a warning rather
    than failing the run.
    """
    from .manifest import read_annotated_manifest

    rows, skipped = read_annotated_manifest(reference_manifest)
    if not rows:
        raise SpeechCapError(f"no annotated rows in {reference_manifest}")
    report = EvaluationReport()
    if skipped:
        report.warnings.append(f"{len(skipped)} reference rows skipped")

    binning = binning or DEFAULT_BINNING
    report.binning_version = binning.version

    if synth_dir is not None:
        synth_dir = Path(synth_dir)
        refs, synths = [], []
        for record, _attrs, labels, _captions in rows:
            clip_path = synth_dir / f"{record.utterance_id}.wav"
            if not clip_path.exists():
                report.n_missing += 1
                continue
            refs.append(labels)
            synths.append(
                SynthesizedUtterance(
                    clip=load_audio(clip_path, sample_rate_hz),
                    transcript=record.transcript,
                    language=record.language,
                )
            )
        if report.n_missing:
            report.warnings.append(f"{report.n_missing} synthesized clips missing")
        if refs:
            result = if_bleu(refs, synths, binning)
            report.if_bleu = result.if_bleu
            report.per_attribute_accuracy = attribute_accuracy(refs, result.candidate_labels)
            report.n_evaluated = len(refs)
    elif predictions_path is not None:
        predictions = {
            row["utterance_id"]: AttributeLabels.from_dict(row["labels"])
            for row in read_jsonl(predictions_path)
        }
        refs, cands = [], []
        for record, _attrs, labels, _captions in rows:
            cand = predictions.get(record.utterance_id)
            if cand is None:
                report.n_missing += 1
                continue
            refs.append(labels)
            cands.append(cand)
        if refs:
            report.per_attribute_accuracy = attribute_accuracy(refs, cands)
            report.n_evaluated = len(refs)
    else:
        report.warnings.append("no synthesized audio or predictions: adherence skipped")

    if asr_path is not None:
        hypotheses = {row["utterance_id"]: row["text"] for row in read_jsonl(asr_path)}
        pairs = [
            (record.transcript, hypotheses[record.utterance_id])
            for record, *_ in rows
            if record.utterance_id in hypotheses
        ]
        if pairs:
            result = cer_wer([p[0] for p in pairs], [p[1] for p in pairs])
            report.cer_pct = result.cer_pct
            report.wer_pct = result.wer_pct

    if emotions_path is not None:
        judgments = read_jsonl(emotions_path)
        if judgments:
            report.confusion = confusion_matrix(
                [j["true"] for j in judgments],
                [j["judged"] for j in judgments],
                emotion_classes,
            )

    if ratings_path is not None:
        ratings = [
            Rating(
                system=row["system"],
                utterance=row.get("utterance", ""),
                rater=row.get("rater", ""),
                score=float(row["score"]),
            )
            for row in read_jsonl(ratings_path)
        ]
        if ratings:
            report.mushra = mushra_aggregate(ratings)
    else:
        report.warnings.append("no rating file: listening-test section omitted")

    if metrics_path is not None:
        metrics = json.loads(Path(metrics_path).read_text(encoding="utf-8"))
        report.mos = metrics.get("mos")
        report.s_sim = metrics.get("s_sim")

    return report
