"""Exported files must pass the analysis core's loader validations cleanly."""
import warnings

import pytest

from bertopic_exporter import TopicModelConfig, fit_and_export

from exporter_corpora import family_corpus, write_table


@pytest.fixture(scope="module")
def sample_export(tmp_path_factory):
    root = tmp_path_factory.mktemp("interchange")
    records = family_corpus(total=1000, seed=5)
    table = root / "utterances.jsonl"
    write_table(table, records)
    config = TopicModelConfig(
        n_neighbors=15, n_components=4, min_cluster_size=20, min_samples=5,
        min_topic_size=20, random_seed=11,
    )
    bundle = fit_and_export(table, config, root / "export")
    return table, bundle


def test_loaders_accept_export_with_zero_warnings(sample_export):
    topicena = pytest.importorskip("topicena")
    table_path, bundle = sample_export
    with warnings.catch_warnings():
        warnings.simplefilter("error")  # any warning fails the test
        utterances = topicena.read_utterance_table(table_path)
        topics = topicena.load_topic_metadata(bundle.topic_metadata_json)
        probs = topicena.load_topic_probabilities(
            bundle.probabilities_csv, topics, utterances
        )
    assert len(utterances) == 1000
    assert probs.values.shape == (1000, len(topics))


def test_row_alignment_is_exact(sample_export):
    topicena = pytest.importorskip("topicena")
    table_path, bundle = sample_export
    utterances = topicena.read_utterance_table(table_path)
    topics = topicena.load_topic_metadata(bundle.topic_metadata_json)
    probs = topicena.load_topic_probabilities(bundle.probabilities_csv, topics)
    assert probs.keys == [u.key for u in utterances]


def test_probability_bounds(sample_export):
    _, bundle = sample_export
    probs = bundle.result.probabilities
    assert probs.min() >= 0.0
    assert probs.max() <= 1.0


def test_export_feeds_full_core_pipeline(sample_export, tmp_path):
    """End-to-end: exporter output drives the core pipeline to SVG plots."""
    pytest.importorskip("topicena")
    from topicena import RunConfig, run_pipeline
    from topicena.corpus import Document, write_corpus

    table_path, bundle = sample_export
    # rebuild a corpus file whose segmentation reproduces the utterance table:
    # one single-sentence document per utterance, scored to split groups
    import json as _json

    docs = []
    with open(table_path, encoding="utf-8") as fh:
        for line in fh:
            rec = _json.loads(line)
            score = 5 if rec["group"] == "HIGH" else 2 if rec["group"] == "LOW" else None
            docs.append(Document(rec["doc_id"], rec["text"], "a1", score))
    corpus_path = tmp_path / "corpus.csv"
    write_corpus(docs, corpus_path, "csv")

    config = RunConfig(
        corpus=str(corpus_path),
        topics=str(bundle.probabilities_csv),
        topic_meta=str(bundle.topic_metadata_json),
        out_dir=str(tmp_path / "run"),
        threshold=0.3,
        compare=("HIGH", "LOW"),
    )
    manifest = run_pipeline(config)
    assert manifest["stages"]["segment"]["utterances"] == 1000
    assert (tmp_path / "run" / "network_subtraction.svg").is_file()
