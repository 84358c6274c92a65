"""HTTP service wrapping the core package.

Single-utterance operations run inline; corpus-scale operations are
exposed as synchronous job endpoints whose file paths are resolved on the
server's filesystem.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..audio import load_audio
from ..attributes import annotate
from ..binning import BinningConfig, DEFAULT_BINNING, bin_attributes, fit_bins, labels_to_sequence
from ..captions import generate_captions, parse_caption
from ..errors import (
    CheckpointMismatchError,
    ConfigVersionError,
    ManifestError,
    PipelineConfigError,
    SpeechCapError,
)
from ..evaluation import Rating, attribute_accuracy, cer_wer, confusion_matrix, mushra_aggregate
from ..pipeline import (
    PipelineConfig,
    run_annotate,
    run_caption,
    run_evaluate,
    run_fit_bins,
    run_stats,
)
from ..records import UtteranceRecord
from . import schemas


def create_app() -> FastAPI:
    app = FastAPI(title="speechcap", version=__version__)

    @app.exception_handler(SpeechCapError)
    async def _domain_error(request: Request, exc: SpeechCapError):
        status = 400
        if isinstance(exc, (ConfigVersionError, CheckpointMismatchError)):
            status = 409
        elif isinstance(exc, (ManifestError, PipelineConfigError)):
            status = 422
        return JSONResponse(
            status_code=status,
            content={"detail": str(exc), "error": type(exc).__name__},
        )

    @app.exception_handler(FileNotFoundError)
    async def _missing_file(request: Request, exc: FileNotFoundError):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request: Request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    # -- single-utterance operations ---------------------------------------

    @app.post("/annotate", response_model=schemas.AnnotateResponse)
    def annotate_utterance(req: schemas.AnnotateRequest):
        record = UtteranceRecord(
            utterance_id=req.utterance_id,
            audio_ref=req.audio_path,
            transcript=req.transcript,
            language=req.language,
            speaker=req.speaker.to_core(),
            style=req.style.to_core(),
        )
        clip = load_audio(req.audio_path, req.sample_rate_hz)
        attrs = annotate(record, clip)
        binning = (
            BinningConfig.load(req.binning_path) if req.binning_path else DEFAULT_BINNING
        )
        labels = bin_attributes(attrs, record.speaker, record.style, binning)
        captions = generate_captions(labels, seed=req.seed)
        return schemas.AnnotateResponse(
            attributes=schemas.AttributesModel.from_core(attrs),
            labels=schemas.LabelsModel.from_core(labels),
            captions=schemas.CaptionSetModel.from_core(captions),
            sequence=labels_to_sequence(labels),
        )

    @app.post("/captions/generate", response_model=schemas.CaptionSetModel)
    def captions_generate(req: schemas.GenerateCaptionsRequest):
        captions = generate_captions(req.labels.to_core(), seed=req.seed)
        return schemas.CaptionSetModel.from_core(captions)

    @app.post("/captions/parse", response_model=schemas.ParseCaptionResponse)
    def captions_parse(req: schemas.ParseCaptionRequest):
        parsed = parse_caption(req.caption)
        parsed.pop("_warnings", None)
        if "env_tags" in parsed:
            parsed["env_tags"] = list(parsed["env_tags"])
        return schemas.ParseCaptionResponse(labels=parsed)

    @app.post("/labels/sequence", response_model=schemas.SequenceResponse)
    def labels_sequence(req: schemas.SequenceRequest):
        return schemas.SequenceResponse(sequence=labels_to_sequence(req.labels.to_core()))

    @app.post("/bins/fit")
    def bins_fit(req: schemas.FitBinsRequest):
        config = fit_bins(req.samples, quantiles=req.quantiles)
        return config.to_json_dict()

    # -- evaluation primitives ----------------------------------------------

    @app.post("/evaluate/cer-wer", response_model=schemas.CerWerResponse)
    def evaluate_cer_wer(req: schemas.CerWerRequest):
        result = cer_wer(
            [p.reference for p in req.pairs], [p.hypothesis for p in req.pairs]
        )
        return schemas.CerWerResponse(
            cer_pct=result.cer_pct,
            wer_pct=result.wer_pct,
            n_pairs=result.n_pairs,
            excluded=result.excluded,
        )

    @app.post("/evaluate/confusion", response_model=schemas.ConfusionResponse)
    def evaluate_confusion(req: schemas.ConfusionRequest):
        matrix = confusion_matrix(req.true_classes, req.judged_classes, req.classes)
        return schemas.ConfusionResponse(**matrix.to_json_dict())

    @app.post("/evaluate/mushra", response_model=schemas.MushraResponse)
    def evaluate_mushra(req: schemas.MushraRequest):
        aggregates = mushra_aggregate(
            (Rating(r.system, r.utterance, r.rater, r.score) for r in req.ratings),
            confidence=req.confidence,
        )
        return schemas.MushraResponse(
            systems={
                s: schemas.MushraAggregateModel(mean=a.mean, half_width=a.half_width, n=a.n)
                for s, a in aggregates.items()
            }
        )

    @app.post("/evaluate/attribute-accuracy", response_model=schemas.AccuracyResponse)
    def evaluate_accuracy(req: schemas.AccuracyRequest):
        accuracy = attribute_accuracy(
            [m.to_core() for m in req.reference], [m.to_core() for m in req.candidate]
        )
        return schemas.AccuracyResponse(per_attribute_accuracy=accuracy)

    # -- corpus-scale jobs ----------------------------------------------------

    @app.post("/jobs/annotate", response_model=schemas.RunReportModel)
    def jobs_annotate(req: schemas.AnnotateJobRequest):
        payload = req.model_dump()
        resume = payload.pop("resume")
        max_rows = payload.pop("max_rows")
        report = run_annotate(PipelineConfig(**payload), resume=resume, max_rows=max_rows)
        return schemas.RunReportModel(**report.to_json_dict())

    @app.post("/jobs/fit-bins")
    def jobs_fit_bins(req: schemas.FitBinsJobRequest):
        config = run_fit_bins(req.manifest, req.output, quantiles=req.quantiles)
        return config.to_json_dict()

    @app.post("/jobs/caption", response_model=schemas.CaptionJobResponse)
    def jobs_caption(req: schemas.CaptionJobRequest):
        from ..grammar import DEFAULT_GRAMMAR, TemplateGrammar

        grammar = (
            TemplateGrammar.load(req.grammar_path) if req.grammar_path else DEFAULT_GRAMMAR
        )
        n = run_caption(req.manifest, req.output, grammar=grammar, seed=req.seed)
        return schemas.CaptionJobResponse(n_rows=n, output=req.output)

    @app.post("/jobs/evaluate", response_model=schemas.EvaluationReportModel)
    def jobs_evaluate(req: schemas.EvaluateJobRequest):
        binning = BinningConfig.load(req.binning_path) if req.binning_path else None
        report = run_evaluate(
            req.reference_manifest,
            synth_dir=req.synth_dir,
            binning=binning,
            ratings_path=req.ratings_path,
            predictions_path=req.predictions_path,
            asr_path=req.asr_path,
            emotions_path=req.emotions_path,
            metrics_path=req.metrics_path,
            sample_rate_hz=req.sample_rate_hz,
        )
        payload = report.to_json_dict()
        mushra = payload.pop("mushra")
        return schemas.EvaluationReportModel(
            **payload,
            mushra={s: schemas.MushraAggregateModel(**a) for s, a in mushra.items()}
            if mushra
            else None,
            text=report.render_text(),
        )

    @app.post("/jobs/stats", response_model=schemas.StatsResponse)
    def jobs_stats(req: schemas.StatsJobRequest):
        report = run_stats(req.manifest)
        return schemas.StatsResponse(
            languages=report.to_json_dict(), table=report.to_table_rows()
        )

    return app


app = create_app()
