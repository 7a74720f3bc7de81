"""Command-line entry point: fit topics over an utterance table and export."""
from __future__ import annotations

import json
import sys

import click

from .config import PRESETS, preset
from .errors import ExporterError
from .export import fit_and_export


@click.command()
@click.option("--utterances", required=True, type=click.Path(exists=True),
              help="Utterance table JSONL.")
@click.option("--preset", "preset_name", default="medium", show_default=True,
              type=click.Choice(sorted(PRESETS)),
              help="Granularity preset (drives n_neighbors).")
@click.option("--seed", default=42, show_default=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--embedding", "embedding_model_id", default=None,
              help="Embedding backend (default: the offline tfidf-svd embedder).")
@click.option("--n-neighbors", default=None, type=int)
@click.option("--n-components", default=None, type=int)
@click.option("--min-cluster-size", default=None, type=int)
@click.option("--min-samples", default=None, type=int)
@click.option("--min-topic-size", default=None, type=int)
def main(utterances, preset_name, seed, out_dir, **overrides):
    """Export topic probabilities and metadata for the analysis core."""
    overrides = {k: v for k, v in overrides.items() if v is not None}
    config = preset(preset_name, seed=seed, **overrides)
    try:
        bundle = fit_and_export(utterances, config, out_dir)
    except ExporterError as exc:
        raise click.ClickException(str(exc)) from exc
    click.echo(
        json.dumps(
            {
                "topic_count": bundle.result.n_topics,
                "outlier_fraction": bundle.result.outlier_fraction,
                "files": [
                    bundle.probabilities_csv.name,
                    bundle.topic_metadata_json.name,
                    bundle.run_report_json.name,
                ],
            },
            indent=2,
            sort_keys=True,
        )
    )


if __name__ == "__main__":
    sys.exit(main())
