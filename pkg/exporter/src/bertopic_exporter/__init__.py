"""Topic-model exporter for the analysis core's interchange formats."""

__version__ = "0.1.0"

from .config import PRESETS, TopicModelConfig, preset
from .errors import ClusteringCollapse, EmbeddingFailure, ExporterError
from .export import ExportBundle, fit_and_export, read_utterance_table
from .model import TopicModelResult, fit_topics

__all__ = [
    "__version__",
    "PRESETS",
    "TopicModelConfig",
    "preset",
    "ClusteringCollapse",
    "EmbeddingFailure",
    "ExporterError",
    "ExportBundle",
    "fit_and_export",
    "read_utterance_table",
    "TopicModelResult",
    "fit_topics",
]
