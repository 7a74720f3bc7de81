class ExporterError(Exception):
    """Base class for exporter errors."""


class EmbeddingFailure(ExporterError):
    """The configured embedding backend could not produce vectors."""


class ClusteringCollapse(ExporterError):
    """Clustering produced no topics (every point an outlier)."""
