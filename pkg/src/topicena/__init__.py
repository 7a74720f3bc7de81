"""Topic-based epistemic network analysis.

Converts utterance-segmented corpora and document-topic probability matrices
into multi-topic binary codings, accumulates co-occurrence networks per unit
of analysis, projects units into a shared low-dimensional space, co-registers
node positions, and renders group / subtraction network plots.
"""

__version__ = "0.1.0"

from .accumulate import (
    AccumulatedModel,
    AdjacencyVector,
    UnitSpec,
    accumulate,
    accumulate_counts,
    group_mean_vector,
    normalize_sphere,
)
from .corpus import (
    Document,
    GroupLabel,
    SegmentationRule,
    Utterance,
    derive_group_label,
    load_corpus,
    read_utterance_table,
    segment_corpus,
    segment_document,
    write_utterance_table,
)
from .network import (
    NetworkGraph,
    NodeLayout,
    NodeLayoutSolver,
    group_mean_network,
    optimize_node_positions,
    subtract_network,
)
from .pipeline import RunConfig, run_from_manifest, run_pipeline, run_sweep
from .projection import (
    MeansRotationProjection,
    ProjectionModel,
    SVDProjection,
    UnitPoint,
    means_rotation_projection,
    project_units,
    svd_projection,
)
from .stats import GroupComparison, mann_whitney_u
from .svg import PlotOptions, render_network_svg
from .topics import (
    CodeMatrix,
    DiagnosticsReport,
    InclusionEncoder,
    TopicInfo,
    TopicProbabilityMatrix,
    coding_diagnostics,
    encode_inclusion,
    load_topic_metadata,
    load_topic_probabilities,
    threshold_sweep,
)

__all__ = [
    "__version__",
    "AccumulatedModel",
    "AdjacencyVector",
    "CodeMatrix",
    "DiagnosticsReport",
    "Document",
    "GroupComparison",
    "GroupLabel",
    "InclusionEncoder",
    "MeansRotationProjection",
    "NetworkGraph",
    "NodeLayout",
    "NodeLayoutSolver",
    "PlotOptions",
    "ProjectionModel",
    "RunConfig",
    "SVDProjection",
    "SegmentationRule",
    "TopicInfo",
    "TopicProbabilityMatrix",
    "UnitPoint",
    "UnitSpec",
    "Utterance",
    "accumulate",
    "accumulate_counts",
    "coding_diagnostics",
    "derive_group_label",
    "encode_inclusion",
    "group_mean_network",
    "group_mean_vector",
    "load_corpus",
    "load_topic_metadata",
    "load_topic_probabilities",
    "mann_whitney_u",
    "means_rotation_projection",
    "normalize_sphere",
    "optimize_node_positions",
    "project_units",
    "read_utterance_table",
    "render_network_svg",
    "run_from_manifest",
    "run_pipeline",
    "run_sweep",
    "segment_corpus",
    "segment_document",
    "subtract_network",
    "svd_projection",
    "threshold_sweep",
    "write_utterance_table",
]
