"""End-to-end pipeline: corpus -> codes -> networks -> plots, with a manifest.

Every stage writes its interchange file into the output directory, and the
manifest records every parameter that affects any output, so a run can be
reproduced from the manifest alone. Outputs contain no timestamps or other
environment state: identical config + inputs give byte-identical files.
"""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .accumulate import (
    UnitSpec,
    accumulate,
    normalize_sphere,
    write_accumulated_model,
)
from .corpus import (
    SegmentationRule,
    Utterance,
    assignment_counts,
    load_corpus,
    read_utterance_table,
    segment_corpus,
    write_utterance_table,
)
from .errors import PipelineStageError
from .network import (
    NetworkGraph,
    NodeLayout,
    group_mean_network,
    optimize_node_positions,
    subtract_network,
    write_network,
)
from .projection import (
    UnitPoint,
    means_rotation_projection,
    svd_projection,
    write_points,
    write_projection,
)
from .stats import mann_whitney_u
from .svg import PlotOptions, render_network_svg
from .topics import (
    CodeMatrix,
    coding_diagnostics,
    encode_inclusion,
    load_topic_metadata,
    load_topic_probabilities,
    write_code_matrix,
)

log = logging.getLogger("topicena")

MANIFEST_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class RunConfig:
    corpus: str
    topics: str  # probability CSV
    topic_meta: str  # metadata JSON
    out_dir: str
    corpus_format: str = "csv"
    threshold: float = 0.05
    boundary: str = "."
    boundary_regex: bool = False
    low_scores: tuple[int, int] | None = (1, 3)
    high_scores: tuple[int, int] | None = (4, 6)
    group_labels: tuple[str, str] = ("LOW", "HIGH")
    unit_keys: tuple[str, ...] = ("doc_id",)
    conversation_keys: tuple[str, ...] = ("conversation_id",)
    window: str = "per_line"
    window_size: int | None = None
    projection: str | None = None  # "svd" | "means"; None resolves by compare
    dims: int = 2
    group_field: str = "group"
    compare: tuple[str, str] | None = None
    seed: int | None = None  # reserved; forwarded to exporter configs
    plot: PlotOptions = field(default_factory=PlotOptions)

    def resolved_projection(self) -> str:
        if self.projection is not None:
            return self.projection
        return "means" if self.compare else "svd"

    def unit_spec(self) -> UnitSpec:
        return UnitSpec(
            unit_keys=self.unit_keys,
            conversation_keys=self.conversation_keys,
            window=self.window,
            window_size=self.window_size,
        )

    def to_dict(self) -> dict:
        raw = asdict(self)
        raw["plot"] = asdict(self.plot)
        return raw

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        raw = dict(raw)
        plot = raw.pop("plot", None)
        config = cls(**{k: _tuplify(k, v) for k, v in raw.items()})
        if plot:
            plot = dict(plot)
            plot["color_pair"] = tuple(plot["color_pair"])
            config = replace(config, plot=PlotOptions(**plot))
        return config


_TUPLE_FIELDS = {
    "low_scores",
    "high_scores",
    "group_labels",
    "unit_keys",
    "conversation_keys",
    "compare",
}


def _tuplify(key: str, value):
    if key in _TUPLE_FIELDS and value is not None:
        return tuple(value)
    return value


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def validate_config(config: RunConfig) -> None:
    """Check everything that must hold before any output is written."""
    for name, path in (("corpus", config.corpus), ("topics", config.topics),
                       ("topic-meta", config.topic_meta)):
        if not Path(path).is_file():
            raise FileNotFoundError(f"{name} file not found: {path}")
    if config.dims < 2:
        raise ValueError("dims must be >= 2 for plotting")
    if config.resolved_projection() == "means" and config.compare is None:
        raise ValueError("means rotation requires a comparison group pair")
    if config.compare is not None and len(set(config.compare)) != 2:
        raise ValueError("comparison requires exactly 2 distinct group labels")


# ---------------------------------------------------------------------------
# stages (each callable from the CLI on the previous stage's files)


def stage_segment(config: RunConfig, out_dir: Path) -> tuple[list[Utterance], dict]:
    docs = load_corpus(config.corpus, config.corpus_format)
    rule = SegmentationRule(config.boundary, config.boundary_regex)
    utterances = segment_corpus(
        docs, rule, config.low_scores, config.high_scores, config.group_labels
    )
    write_utterance_table(utterances, out_dir / "utterances.jsonl")
    counts = assignment_counts(utterances, docs)
    summary = {
        "documents": len(docs),
        "utterances": len(utterances),
        "per_assignment": {
            k: {"essays": v["essays"], "utterances": v["utterances"]}
            for k, v in sorted(counts.items())
        },
    }
    log.info("segment: %d documents -> %d utterances", len(docs), len(utterances))
    return utterances, summary


def stage_encode(
    config: RunConfig, out_dir: Path, utterances: list[Utterance]
) -> tuple[CodeMatrix, dict]:
    topics = load_topic_metadata(config.topic_meta)
    probs = load_topic_probabilities(config.topics, topics, utterances)
    codes = encode_inclusion(probs, config.threshold)
    write_code_matrix(codes, out_dir / "codes.csv")
    diagnostics = coding_diagnostics(codes)
    _write_json(diagnostics.to_dict(), out_dir / "coding_diagnostics.json")
    log.info(
        "encode: threshold %.4g, mean codes/row %.3f, zero rows %.3f",
        config.threshold,
        diagnostics.codes_per_row_mean,
        diagnostics.zero_row_fraction,
    )
    return codes, diagnostics.to_dict()


def stage_model(
    config: RunConfig,
    out_dir: Path,
    utterances: list[Utterance],
    codes: CodeMatrix,
):
    model = normalize_sphere(
        accumulate(codes, utterances, config.unit_spec(), config.group_field)
    )
    write_accumulated_model(model, out_dir / "accumulated.json")

    method = config.resolved_projection()
    if method == "means":
        group_a, group_b = config.compare
        projection, points = means_rotation_projection(
            model, group_a, group_b, config.dims
        )
    elif method == "svd":
        projection, points = svd_projection(model, config.dims)
    else:
        raise ValueError(f"unknown projection method {method!r}")
    write_projection(projection, out_dir / "projection.json")
    write_points(points, out_dir / "points.csv")

    layout = optimize_node_positions(model, points, projection)
    networks: dict[str, tuple[NetworkGraph, NodeLayout]] = {}
    stats_out: dict = {}
    if config.compare:
        group_a, group_b = config.compare
        net_a = group_mean_network(model, group_a)
        net_b = group_mean_network(model, group_b)
        net_sub = subtract_network(net_a, net_b)
        networks[f"network_{group_a}"] = (net_a, layout)
        networks[f"network_{group_b}"] = (net_b, layout)
        networks["network_subtraction"] = (net_sub, layout)
        coords = {
            g: np.vstack(
                [pt.coords for pt in points if pt.group == g]
            )
            for g in (group_a, group_b)
        }
        stats_out = {
            "groups": [group_a, group_b],
            "dimensions": [
                mann_whitney_u(
                    coords[group_a][:, k], coords[group_b][:, k], dimension=k
                ).to_dict()
                for k in range(config.dims)
            ],
            "subtraction_l1_mass": net_sub.l1_mass(),
        }
    else:
        # ungrouped run: one overall mean network over every unit
        overall = NetworkGraph(
            kind="group_mean",
            topics=list(model.topics),
            pair_order=list(model.pair_order),
            weights=model.vectors.mean(axis=0),
            group=None,
        )
        networks["network_mean"] = (overall, layout)

    for name, (graph, graph_layout) in networks.items():
        write_network(graph, out_dir / f"{name}.json", graph_layout)

    model_info = {
        "projection_method": projection.method,
        "variance_explained": [float(v) for v in projection.variance_explained],
        "layout_fit_pearson": [
            None if np.isnan(v) else float(v) for v in layout.pearson
        ],
        "layout_fit_spearman": [
            None if np.isnan(v) else float(v) for v in layout.spearman
        ],
        "zero_units": len(model.zero_units or []),
        "networks": sorted(networks.keys()),
    }
    log.info("model: %s projection, %d units", projection.method, model.n_units)
    graphs = {name: graph for name, (graph, _) in networks.items()}
    return projection, points, layout, {**model_info, "stats": stats_out}, graphs


def stage_plot(
    config: RunConfig,
    out_dir: Path,
    graphs: dict[str, NetworkGraph],
    layout: NodeLayout,
    points: list[UnitPoint],
) -> list[str]:
    rendered = []
    for name in sorted(graphs.keys()):
        svg = render_network_svg(graphs[name], layout, points, config.plot)
        path = out_dir / f"{name}.svg"
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
        rendered.append(path.name)
    return rendered


def run_pipeline(config: RunConfig) -> dict:
    """Execute segment -> encode -> model -> plot and write the manifest."""
    try:
        validate_config(config)
    except Exception as exc:
        raise PipelineStageError("config", exc) from exc

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    def run_stage(stage, fn, *args):
        try:
            return fn(config, out_dir, *args)
        except PipelineStageError:
            raise
        except Exception as exc:
            raise PipelineStageError(stage, exc) from exc

    utterances, segment_summary = run_stage("segment", stage_segment)
    codes, encode_summary = run_stage("encode", stage_encode, utterances)
    projection, points, layout, model_summary, graphs = run_stage(
        "model", stage_model, utterances, codes
    )
    plots = run_stage("plot", stage_plot, graphs, layout, points)

    # the output directory is where the manifest itself lives; recording it
    # relative keeps manifests relocatable and runs byte-identical
    config_record = config.to_dict()
    config_record["out_dir"] = "."
    manifest = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "tool": {"name": "topicena", "version": __version__},
        "config": config_record,
        "tolerances": {
            "orthonormality": projection.tolerance,
            "layout_ridge": 1e-8,
            "inclusion_comparison": "strict_greater_than",
        },
        "stages": {
            "segment": segment_summary,
            "encode": encode_summary,
            "model": model_summary,
            "plot": {"rendered": plots},
        },
        "files": sorted(
            p.name for p in out_dir.iterdir() if p.is_file() and p.name != "manifest.json"
        ),
    }
    _write_json(manifest, out_dir / "manifest.json")
    return manifest


def run_from_manifest(manifest_path, out_dir: str | None = None) -> dict:
    """Re-run a pipeline from its manifest; reproduces the original outputs."""
    manifest_path = Path(manifest_path)
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    config = RunConfig.from_dict(manifest["config"])
    if out_dir is None:
        out_dir = str(manifest_path.parent)
    return run_pipeline(replace(config, out_dir=out_dir))


def run_sweep(config: RunConfig, thresholds: list[float]) -> dict:
    """One full pipeline per threshold, in sibling directories, plus a summary."""
    if list(thresholds) != sorted(thresholds):
        raise ValueError("sweep thresholds must be sorted ascending")
    root = Path(config.out_dir)
    root.mkdir(parents=True, exist_ok=True)
    runs = []
    for t in thresholds:
        sub = root / f"threshold_{t:g}"
        run_config = replace(config, threshold=float(t), out_dir=str(sub))
        manifest = run_pipeline(run_config)
        entry = {
            "threshold": float(t),
            "out_dir": sub.name,
            "coding": manifest["stages"]["encode"],
        }
        stats = manifest["stages"]["model"].get("stats") or {}
        if "subtraction_l1_mass" in stats:
            entry["subtraction_l1_mass"] = stats["subtraction_l1_mass"]
        runs.append(entry)
    summary = {
        "schema_version": MANIFEST_SCHEMA_VERSION,
        "tool": {"name": "topicena", "version": __version__},
        "thresholds": [float(t) for t in thresholds],
        "runs": runs,
    }
    _write_json(summary, root / "sweep_summary.json")
    return summary


__all__ = [
    "RunConfig",
    "run_pipeline",
    "run_from_manifest",
    "run_sweep",
    "stage_segment",
    "stage_encode",
    "stage_model",
    "stage_plot",
    "validate_config",
    "read_utterance_table",
]
