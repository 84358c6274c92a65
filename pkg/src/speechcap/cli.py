"""Command-line client for the annotation service.

Every subcommand is a thin HTTP client: with ``--server`` it talks to a
running instance, otherwise it dispatches to an in-process copy of the
service app, so the CLI works standalone while exercising exactly the
same request/response surface.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click
import httpx

from .errors import PipelineConfigError
from .pipeline import PipelineConfig

SERVER_ENV = "SPEECHCAP_SERVER"


def _client(server: str | None) -> httpx.Client:
    if server:
        return httpx.Client(base_url=server, timeout=None)
    from fastapi.testclient import TestClient

    from .service.app import app

    return TestClient(app, raise_server_exceptions=False)


def _post(ctx: click.Context, path: str, payload: dict) -> dict:
    client = _client(ctx.obj.get("server"))
    try:
        with client:
            response = client.post(path, json=payload)
    except httpx.HTTPError as exc:
        raise click.ClickException(f"cannot reach service: {exc}")
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise click.ClickException(f"{path} failed ({response.status_code}): {detail}")
    return response.json()


@click.group()
@click.option(
    "--server",
    envvar=SERVER_ENV,
    default=None,
    help="Base URL of a running service; defaults to in-process dispatch.",
)
@click.pass_context
def main(ctx: click.Context, server: str | None):
    """Corpus annotation, captioning and evaluation toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server


def _load_job_config(config_path: str | None, overrides: dict) -> dict:
    if config_path:
        config = PipelineConfig.load(config_path, overrides)
    else:
        try:
            config = PipelineConfig(**{k: v for k, v in overrides.items() if v is not None})
        except TypeError as exc:
            raise PipelineConfigError(str(exc))
    return {k: v for k, v in vars(config).items()}


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--manifest", default=None)
@click.option("--output", default=None)
@click.option("--corpus-root", default=None)
@click.option("--workers", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--resume", is_flag=True, default=False)
@click.option("--max-rows", type=int, default=None, help="Stop after N new rows (partial run).")
@click.pass_context
def annotate(ctx, config_path, manifest, output, corpus_root, workers, seed, resume, max_rows):
    """Annotate a corpus manifest end to end."""
    try:
        payload = _load_job_config(
            config_path,
            {"manifest": manifest, "output": output, "corpus_root": corpus_root,
             "workers": workers, "seed": seed},
        )
    except PipelineConfigError as exc:
        raise click.ClickException(str(exc))
    payload["resume"] = resume
    payload["max_rows"] = max_rows
    report = _post(ctx, "/jobs/annotate", payload)
    click.echo(json.dumps(report, indent=2))
    if report["n_failed"]:
        click.echo(f"completed with {report['n_failed']} per-utterance failures", err=True)


@main.command("fit-bins")
@click.option("--manifest", required=True)
@click.option("--output", required=True)
@click.option("--quantiles", default=None, help="Comma-separated, e.g. 0.2,0.4,0.6,0.8")
@click.pass_context
def fit_bins_cmd(ctx, manifest, output, quantiles):
    """Fit bin boundaries from an annotated manifest."""
    q = [float(x) for x in quantiles.split(",")] if quantiles else None
    config = _post(ctx, "/jobs/fit-bins", {"manifest": manifest, "output": output, "quantiles": q})
    Path(output).write_text(json.dumps(config, indent=2) + "\n", encoding="utf-8")
    click.echo(f"wrote binning config version {config['version']} to {output}")


@main.command()
@click.option("--manifest", required=True)
@click.option("--output", required=True)
@click.option("--grammar", "grammar_path", default=None)
@click.option("--seed", type=int, default=0)
@click.pass_context
def caption(ctx, manifest, output, grammar_path, seed):
    """Regenerate captions for an annotated manifest."""
    result = _post(
        ctx,
        "/jobs/caption",
        {"manifest": manifest, "output": output, "grammar_path": grammar_path, "seed": seed},
    )
    click.echo(f"captioned {result['n_rows']} rows -> {result['output']}")


@main.command()
@click.option("--reference", "reference_manifest", required=True)
@click.option("--synth-dir", default=None)
@click.option("--binning", "binning_path", default=None)
@click.option("--ratings", "ratings_path", default=None)
@click.option("--predictions", "predictions_path", default=None)
@click.option("--asr", "asr_path", default=None)
@click.option("--emotions", "emotions_path", default=None)
@click.option("--metrics", "metrics_path", default=None)
@click.option("--json-out", default=None, help="Also write the structured report here.")
@click.pass_context
def evaluate(ctx, reference_manifest, synth_dir, binning_path, ratings_path,
             predictions_path, asr_path, emotions_path, metrics_path, json_out):
    """Evaluate synthesized audio / external predictions against a reference."""
    report = _post(
        ctx,
        "/jobs/evaluate",
        {
            "reference_manifest": reference_manifest,
            "synth_dir": synth_dir,
            "binning_path": binning_path,
            "ratings_path": ratings_path,
            "predictions_path": predictions_path,
            "asr_path": asr_path,
            "emotions_path": emotions_path,
            "metrics_path": metrics_path,
        },
    )
    text = report.pop("text")
    click.echo(text)
    if json_out:
        Path(json_out).write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")


@main.command()
@click.option("--manifest", required=True)
@click.option("--csv-out", default=None, help="Write the per-language table as CSV.")
@click.pass_context
def stats(ctx, manifest, csv_out):
    """Per-language duration and label-distribution report."""
    result = _post(ctx, "/jobs/stats", {"manifest": manifest})
    click.echo(json.dumps(result["languages"], indent=2, ensure_ascii=False))
    if csv_out:
        import csv

        rows = result["table"]
        with open(csv_out, "w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=["language", "utterances", "hours"])
            writer.writeheader()
            writer.writerows(rows)
        click.echo(f"wrote {csv_out}", err=True)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    sys.exit(main())
