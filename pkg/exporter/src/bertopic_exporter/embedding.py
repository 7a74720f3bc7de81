"""Sentence embedding backends.

``tfidf-svd`` is the built-in default: TF-IDF features reduced by truncated
SVD (latent semantic analysis), fully offline and deterministic under a fixed
seed. Any other model id is treated as a sentence-transformers model name and
loaded lazily; environments without that package (or without the model files)
get an EmbeddingFailure instead of a silent fallback.
"""
from __future__ import annotations

import numpy as np
from sklearn.decomposition import TruncatedSVD
from sklearn.feature_extraction.text import TfidfVectorizer
from sklearn.preprocessing import normalize

from .config import DEFAULT_EMBEDDING
from .errors import EmbeddingFailure

_TFIDF_DIMS = 64


def embed_texts(texts: list[str], model_id: str, seed: int) -> np.ndarray:
    if not texts:
        raise EmbeddingFailure("no texts to embed")
    if model_id == DEFAULT_EMBEDDING:
        return _tfidf_svd(texts, seed)
    return _sentence_transformer(texts, model_id)


def _tfidf_svd(texts: list[str], seed: int) -> np.ndarray:
    vectorizer = TfidfVectorizer(lowercase=True, sublinear_tf=True)
    try:
        tfidf = vectorizer.fit_transform(texts)
    except ValueError as exc:  # empty vocabulary
        raise EmbeddingFailure(str(exc)) from exc
    dims = min(_TFIDF_DIMS, tfidf.shape[1] - 1, tfidf.shape[0] - 1)
    if dims < 1:
        # too little text to reduce; use the raw tf-idf rows
        return normalize(tfidf.toarray())
    svd = TruncatedSVD(n_components=dims, random_state=seed)
    return normalize(svd.fit_transform(tfidf))


def _sentence_transformer(texts: list[str], model_id: str) -> np.ndarray:
    try:
        from sentence_transformers import SentenceTransformer
    except ImportError as exc:
        raise EmbeddingFailure(
            f"embedding model {model_id!r} needs the sentence-transformers package"
        ) from exc
    try:
        model = SentenceTransformer(model_id)
        return np.asarray(model.encode(texts, show_progress_bar=False))
    except Exception as exc:
        raise EmbeddingFailure(f"failed to embed with {model_id!r}: {exc}") from exc
