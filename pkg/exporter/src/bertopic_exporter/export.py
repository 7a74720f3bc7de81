"""Fit a topic model over an utterance table and export the interchange files.

Outputs use the analysis core's schemas exactly: a probability CSV with one
row per utterance (doc_id, utterance_index, one column per topic label), a
topic metadata JSON array, and a run report echoing the full configuration.
The outlier topic never appears as a column; outlier utterances keep their
row with all-zero probabilities so row alignment is preserved.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .config import TopicModelConfig
from .embedding import embed_texts
from .model import TopicModelResult, fit_topics

SCHEMA_VERSION = 1


@dataclass
class ExportBundle:
    probabilities_csv: Path
    topic_metadata_json: Path
    run_report_json: Path
    result: TopicModelResult


def read_utterance_table(path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            obj = json.loads(raw)
            rows.append(
                {
                    "doc_id": str(obj["doc_id"]),
                    "utterance_index": int(obj["utterance_index"]),
                    "text": str(obj["text"]),
                }
            )
    return rows


def fit_and_export(utterances_path, config: TopicModelConfig, out_dir) -> ExportBundle:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = read_utterance_table(utterances_path)
    texts = [r["text"] for r in rows]

    embeddings = embed_texts(texts, config.embedding_model_id, config.random_seed)
    result = fit_topics(texts, embeddings, config)

    labels = [t["label"] for t in result.topics]
    probs_path = out_dir / "topic_probabilities.csv"
    with open(probs_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["doc_id", "utterance_index"] + labels) + "\n")
        for row, p in zip(rows, result.probabilities):
            fh.write(
                ",".join(
                    [row["doc_id"], str(row["utterance_index"])]
                    + [repr(float(v)) for v in p]
                )
                + "\n"
            )

    meta_path = out_dir / "topic_metadata.json"
    payload = [
        {
            "topic_id": t["topic_id"],
            "label": t["label"],
            "top_words": list(t["top_words"]),
        }
        for t in result.topics
    ]
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")

    report_path = out_dir / "run_report.json"
    report = {
        "schema_version": SCHEMA_VERSION,
        "config": config.to_dict(),
        "effective": result.effective,
        "embedding_backend": config.embedding_model_id,
        "probability_method": (
            "row-normalized exp(-distance/scale) to topic centroids in the "
            "reduced space; scale = median nearest-centroid distance; "
            "outlier rows zeroed"
        ),
        "n_utterances": len(rows),
        "topic_count": result.n_topics,
        "outlier_fraction": result.outlier_fraction,
        "topic_sizes": {str(t["topic_id"]): t["size"] for t in result.topics},
    }
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")

    return ExportBundle(
        probabilities_csv=probs_path,
        topic_metadata_json=meta_path,
        run_report_json=report_path,
        result=result,
    )
