"""Command-line interface.

Subcommands mirror the pipeline stages (`segment`, `encode`, `model`, `plot`)
plus the orchestrators (`pipeline`, `sweep`). Any stage can be re-run from the
previous stage's files with results identical to the end-to-end run. Log level
comes from the TOPICENA_LOG environment variable.
"""
from __future__ import annotations

import json
import logging
import os
import sys
from pathlib import Path

import click

from . import __version__
from .corpus import read_utterance_table
from .errors import TopicENAError
from .network import read_network
from .pipeline import (
    RunConfig,
    run_from_manifest,
    run_pipeline,
    run_sweep,
    stage_encode,
    stage_model,
    stage_plot,
    stage_segment,
)
from .projection import read_points
from .topics import load_topic_metadata, read_code_matrix


def _setup_logging() -> None:
    level = os.environ.get("TOPICENA_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _parse_window(value: str) -> tuple[str, int | None]:
    if value == "per-line":
        return "per_line", None
    if value == "conversation":
        return "whole_conversation", None
    if value.startswith("moving:"):
        return "moving", int(value.split(":", 1)[1])
    raise click.BadParameter(
        f"window must be per-line, moving:W, or conversation, got {value!r}"
    )


def _parse_projection(value: str | None) -> tuple[str | None, tuple[str, str] | None]:
    if value is None:
        return None, None
    if value == "svd":
        return "svd", None
    if value.startswith("means:"):
        pair = value.split(":", 1)[1].split(",")
        if len(pair) != 2:
            raise click.BadParameter("means projection needs two labels: means:A,B")
        return "means", (pair[0], pair[1])
    raise click.BadParameter(f"projection must be svd or means:A,B, got {value!r}")


def _parse_scores(value: str | None) -> tuple[int, int] | None:
    if value is None or value == "":
        return None
    lo, _, hi = value.partition("-")
    return (int(lo), int(hi))


def _parse_thresholds(value: str) -> list[float]:
    if value.startswith("thresholds="):
        value = value.split("=", 1)[1]
    return [float(t) for t in value.split(",") if t]


_config_options = [
    click.option("--corpus", default=None, type=click.Path(), help="Corpus file."),
    click.option("--format", "corpus_format", default="csv",
                 type=click.Choice(["csv", "jsonl"]), help="Corpus file format."),
    click.option("--topics", default=None, type=click.Path(),
                 help="Topic probability CSV."),
    click.option("--topic-meta", default=None, type=click.Path(),
                 help="Topic metadata JSON."),
    click.option("--threshold", default=0.05, show_default=True, type=float,
                 help="Topic inclusion threshold (strict greater-than)."),
    click.option("--window", default="per-line", show_default=True,
                 help="per-line | moving:W | conversation."),
    click.option("--projection", default=None,
                 help="svd | means:GROUPA,GROUPB (default: means when comparing)."),
    click.option("--dims", default=2, show_default=True, type=int),
    click.option("--group-field", default="group", show_default=True),
    click.option("--compare", default=None,
                 help="Two group labels, e.g. HIGH,LOW (enables subtraction + stats)."),
    click.option("--low-scores", default="1-3", show_default=True,
                 help="Inclusive score band for the LOW group ('' disables)."),
    click.option("--high-scores", default="4-6", show_default=True,
                 help="Inclusive score band for the HIGH group ('' disables)."),
    click.option("--boundary", default=".", show_default=True,
                 help="Utterance boundary marker."),
    click.option("--boundary-regex", is_flag=True, default=False,
                 help="Treat --boundary as a regular expression."),
    click.option("--seed", default=None, type=int,
                 help="Reserved; recorded and forwarded to exporter configs."),
    click.option("--out", "out_dir", default=None, type=click.Path()),
]


def _with_config_options(fn):
    for option in reversed(_config_options):
        fn = option(fn)
    return fn


def _build_config(corpus, corpus_format, topics, topic_meta, threshold, window,
                  projection, dims, group_field, compare, low_scores, high_scores,
                  boundary, boundary_regex, seed, out_dir) -> RunConfig:
    for name, value in (("--corpus", corpus), ("--topics", topics),
                        ("--topic-meta", topic_meta), ("--out", out_dir)):
        if not value:
            raise click.BadParameter(f"{name} is required")
    window_kind, window_size = _parse_window(window)
    method, method_pair = _parse_projection(projection)
    compare_pair = tuple(compare.split(",")) if compare else method_pair
    if compare_pair is not None and len(compare_pair) != 2:
        raise click.BadParameter("--compare needs exactly two labels: A,B")
    return RunConfig(
        corpus=corpus,
        corpus_format=corpus_format,
        topics=topics,
        topic_meta=topic_meta,
        out_dir=out_dir,
        threshold=threshold,
        boundary=boundary,
        boundary_regex=boundary_regex,
        low_scores=_parse_scores(low_scores),
        high_scores=_parse_scores(high_scores),
        window=window_kind,
        window_size=window_size,
        projection=method,
        dims=dims,
        group_field=group_field,
        compare=compare_pair,
        seed=seed,
    )


@click.group()
@click.version_option(__version__)
def main():
    """Topic-based epistemic network analysis pipeline."""
    _setup_logging()


@main.command()
@click.option("--corpus", required=True, type=click.Path(exists=True))
@click.option("--format", "corpus_format", default="csv",
              type=click.Choice(["csv", "jsonl"]))
@click.option("--boundary", default=".", show_default=True)
@click.option("--boundary-regex", is_flag=True, default=False)
@click.option("--low-scores", default="1-3", show_default=True)
@click.option("--high-scores", default="4-6", show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
def segment(corpus, corpus_format, boundary, boundary_regex, low_scores,
            high_scores, out_dir):
    """Segment a corpus into the utterance table."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = RunConfig(
        corpus=corpus, corpus_format=corpus_format, topics="", topic_meta="",
        out_dir=out_dir, boundary=boundary, boundary_regex=boundary_regex,
        low_scores=_parse_scores(low_scores), high_scores=_parse_scores(high_scores),
    )
    _, summary = stage_segment(config, out)
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@main.command()
@click.option("--utterances", required=True, type=click.Path(exists=True))
@click.option("--topics", required=True, type=click.Path(exists=True))
@click.option("--topic-meta", required=True, type=click.Path(exists=True))
@click.option("--threshold", default=0.05, show_default=True, type=float)
@click.option("--out", "out_dir", required=True, type=click.Path())
def encode(utterances, topics, topic_meta, threshold, out_dir):
    """Threshold-code a topic probability matrix."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config = RunConfig(corpus="", topics=topics, topic_meta=topic_meta,
                       out_dir=out_dir, threshold=threshold)
    table = read_utterance_table(utterances)
    _, diagnostics = stage_encode(config, out, table)
    click.echo(json.dumps(diagnostics, indent=2, sort_keys=True))


@main.command()
@click.option("--utterances", required=True, type=click.Path(exists=True))
@click.option("--codes", required=True, type=click.Path(exists=True),
              help="Code matrix CSV (threshold sidecar alongside).")
@click.option("--topic-meta", required=True, type=click.Path(exists=True))
@click.option("--window", default="per-line", show_default=True)
@click.option("--projection", default=None)
@click.option("--dims", default=2, show_default=True, type=int)
@click.option("--compare", default=None)
@click.option("--out", "out_dir", required=True, type=click.Path())
def model(utterances, codes, topic_meta, window, projection, dims, compare, out_dir):
    """Accumulate, project, build networks, and co-register nodes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    window_kind, window_size = _parse_window(window)
    method, method_pair = _parse_projection(projection)
    compare_pair = tuple(compare.split(",")) if compare else method_pair
    config = RunConfig(
        corpus="", topics="", topic_meta=topic_meta, out_dir=out_dir,
        window=window_kind, window_size=window_size, projection=method,
        dims=dims, compare=compare_pair,
    )
    table = read_utterance_table(utterances)
    topic_list = load_topic_metadata(topic_meta)
    code_matrix = read_code_matrix(codes, topic_list)
    _, _, _, summary, _ = stage_model(config, out, table, code_matrix)
    click.echo(json.dumps(summary, indent=2, sort_keys=True))


@main.command()
@click.option("--model-dir", required=True, type=click.Path(exists=True),
              help="Directory holding network_*.json and points.csv.")
@click.option("--out", "out_dir", required=True, type=click.Path())
def plot(model_dir, out_dir):
    """Render SVG plots from saved network files."""
    model_path = Path(model_dir)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    points_file = model_path / "points.csv"
    points = read_points(points_file) if points_file.is_file() else None
    graphs = {}
    layout = None
    for path in sorted(model_path.glob("network_*.json")):
        graph, graph_layout = read_network(path)
        graphs[path.stem] = graph
        layout = graph_layout or layout
    if not graphs:
        raise click.ClickException(f"no network_*.json files in {model_dir}")
    config = RunConfig(corpus="", topics="", topic_meta="", out_dir=str(out))
    rendered = stage_plot(config, out, graphs, layout, points)
    click.echo(json.dumps({"rendered": rendered}, indent=2, sort_keys=True))


@main.command()
@_with_config_options
@click.option("--sweep", "sweep_spec", default=None,
              help="thresholds=T1,T2,... runs one pipeline per threshold.")
@click.option("--from-manifest", "manifest_path", default=None, type=click.Path(),
              help="Re-run a recorded configuration (other flags ignored).")
def pipeline(sweep_spec, manifest_path, **kwargs):
    """Run the full pipeline end to end."""
    if manifest_path:
        manifest = run_from_manifest(manifest_path, kwargs.get("out_dir"))
        click.echo(json.dumps({"out_dir": manifest["config"]["out_dir"]}, sort_keys=True))
        return
    config = _build_config(**kwargs)
    try:
        if sweep_spec:
            summary = run_sweep(config, _parse_thresholds(sweep_spec))
            click.echo(json.dumps(summary["runs"], indent=2, sort_keys=True))
        else:
            manifest = run_pipeline(config)
            click.echo(json.dumps(manifest["stages"]["model"], indent=2, sort_keys=True))
    except TopicENAError as exc:
        raise click.ClickException(str(exc)) from exc


@main.command()
@_with_config_options
@click.option("--thresholds", required=True,
              help="Comma-separated ascending thresholds, e.g. 0.01,0.05,0.10.")
def sweep(thresholds, **kwargs):
    """Run one full pipeline per inclusion threshold plus a sweep summary."""
    config = _build_config(**kwargs)
    try:
        summary = run_sweep(config, _parse_thresholds(thresholds))
    except TopicENAError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(json.dumps(summary["runs"], indent=2, sort_keys=True))


if __name__ == "__main__":
    sys.exit(main())
