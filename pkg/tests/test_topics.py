import json

import numpy as np
import pytest

from topicena.corpus import Utterance
from topicena.errors import ParseError
from topicena.topics import (
    InclusionEncoder,
    TopicInfo,
    TopicProbabilityMatrix,
    coding_diagnostics,
    encode_inclusion,
    load_topic_metadata,
    load_topic_probabilities,
    read_code_matrix,
    threshold_sweep,
    write_code_matrix,
    write_topic_metadata,
    write_topic_probabilities,
)


def make_probs(values, labels=None):
    values = np.asarray(values, dtype=np.float64)
    k = values.shape[1]
    topics = [TopicInfo(i, labels[i] if labels else f"t{i}") for i in range(k)]
    keys = [(f"d{i}", 0) for i in range(values.shape[0])]
    return TopicProbabilityMatrix(keys=keys, topics=topics, values=values)


def test_encode_low_threshold_keeps_all():
    codes = encode_inclusion(make_probs([[0.6, 0.3, 0.1]]), 0.05)
    assert codes.values.tolist() == [[1, 1, 1]]
    assert codes.threshold_used == 0.05


def test_encode_high_threshold_keeps_first():
    codes = encode_inclusion(make_probs([[0.6, 0.3, 0.1]]), 0.5)
    assert codes.values.tolist() == [[1, 0, 0]]


def test_encode_equality_excluded():
    codes = encode_inclusion(make_probs([[0.1, 0.1]]), 0.1)
    assert codes.values.tolist() == [[0, 0]]


def test_encode_threshold_bounds():
    with pytest.raises(ValueError):
        encode_inclusion(make_probs([[0.5]]), 1.5)


def test_encoder_rejects_out_of_range_probabilities():
    with pytest.raises(ValueError):
        InclusionEncoder(0.5).fit(np.array([[1.2, 0.0]]))


def test_diagnostics_hand_counted():
    codes = encode_inclusion(make_probs([[0.9, 0.9], [0.1, 0.9], [0.1, 0.1]]), 0.5)
    assert codes.values.tolist() == [[1, 1], [0, 1], [0, 0]]
    report = coding_diagnostics(codes)
    assert report.codes_per_row_mean == 1.0
    assert report.zero_row_fraction == pytest.approx(1 / 3)
    assert report.topic_counts == [1, 2]
    assert not report.all_rows_zero


def test_diagnostics_saturated():
    report = coding_diagnostics(encode_inclusion(make_probs([[1.0, 1.0], [1.0, 1.0]]), 0.5))
    assert report.codes_per_row_mean == 2.0
    assert report.zero_row_fraction == 0.0


def test_diagnostics_all_zero():
    report = coding_diagnostics(encode_inclusion(make_probs([[0.0, 0.0], [0.0, 0.0]]), 0.5))
    assert report.zero_row_fraction == 1.0
    assert report.all_rows_zero


def test_sweep_mean_codes_non_increasing(rng):
    probs = make_probs(rng.random((40, 5)))
    reports = threshold_sweep(probs, [0.01, 0.05, 0.10])
    means = [r.codes_per_row_mean for _, r in reports]
    assert means == sorted(means, reverse=True)
    assert [t for t, _ in reports] == [0.01, 0.05, 0.10]


def test_sweep_zero_threshold_codes_positive_entries():
    probs = make_probs([[0.0, 0.3], [0.2, 0.0]])
    (_, report), = threshold_sweep(probs, [0.0])
    assert report.codes_per_row_mean == 1.0  # only strictly positive entries


def test_sweep_threshold_one_codes_nothing():
    probs = make_probs([[1.0, 0.5]])
    (_, report), = threshold_sweep(probs, [1.0])
    assert report.all_rows_zero


def test_sweep_requires_sorted():
    with pytest.raises(ValueError):
        threshold_sweep(make_probs([[0.5]]), [0.10, 0.05])


def test_monotonicity_property(rng):
    # CodeMatrix(t2) <= CodeMatrix(t1) element-wise for t1 <= t2
    for _ in range(25):
        probs = make_probs(rng.random((30, 4)))
        t1, t2 = sorted(rng.random(2))
        c1 = encode_inclusion(probs, t1).values
        c2 = encode_inclusion(probs, t2).values
        assert (c2 <= c1).all()


def test_encoding_row_permutation_equivariance(rng):
    values = rng.random((20, 3))
    perm = rng.permutation(20)
    base = encode_inclusion(make_probs(values), 0.3).values
    permuted = encode_inclusion(make_probs(values[perm]), 0.3).values
    assert (permuted == base[perm]).all()


def test_code_matrix_serialization_fixed_point(tmp_path, rng):
    probs = make_probs(rng.random((12, 3)))
    codes = encode_inclusion(probs, 0.37)
    first = tmp_path / "codes.csv"
    write_code_matrix(codes, first)
    loaded = read_code_matrix(first, codes.topics)
    assert loaded.threshold_used == 0.37
    assert (loaded.values == codes.values).all()
    assert loaded.keys == codes.keys
    second = tmp_path / "codes2.csv"
    write_code_matrix(loaded, second, tmp_path / "codes2.threshold.json")
    assert first.read_bytes() == second.read_bytes()


def test_metadata_round_trip(tmp_path):
    topics = [TopicInfo(0, "driverless.driver", ("driverless", "driver"))]
    path = tmp_path / "topics.json"
    write_topic_metadata(topics, path)
    assert load_topic_metadata(path) == topics


def test_metadata_rejects_outlier_topic(tmp_path):
    path = tmp_path / "topics.json"
    path.write_text(json.dumps([{"topic_id": -1, "label": "noise"}]))
    with pytest.raises(ParseError):
        load_topic_metadata(path)


def test_metadata_rejects_duplicate_labels(tmp_path):
    path = tmp_path / "topics.json"
    path.write_text(
        json.dumps(
            [{"topic_id": 0, "label": "same"}, {"topic_id": 1, "label": "same"}]
        )
    )
    with pytest.raises(ParseError):
        load_topic_metadata(path)


def test_probability_csv_round_trip_reorders_columns(tmp_path):
    labels = ["beta", "alpha"]  # file order differs from topic order
    topics = [TopicInfo(0, "beta"), TopicInfo(1, "alpha")]
    path = tmp_path / "probs.csv"
    path.write_text(
        "doc_id,utterance_index,alpha,beta\n"
        "d0,0,0.25,0.75\n"
        "d1,0,0.5,0.5\n"
    )
    probs = load_topic_probabilities(path, topics)
    assert [t.label for t in probs.topics] == labels
    assert probs.values.tolist() == [[0.75, 0.25], [0.5, 0.5]]


def test_probability_csv_rejects_out_of_range(tmp_path):
    topics = [TopicInfo(0, "a")]
    path = tmp_path / "probs.csv"
    path.write_text("doc_id,utterance_index,a\nd0,0,1.5\n")
    with pytest.raises(ParseError):
        load_topic_probabilities(path, topics)


def test_probability_csv_rejects_unknown_keys(tmp_path):
    topics = [TopicInfo(0, "a")]
    path = tmp_path / "probs.csv"
    path.write_text("doc_id,utterance_index,a\nd0,0,0.5\nd9,0,0.5\n")
    table = [Utterance("d0", 0, "hello")]
    with pytest.raises(ParseError):
        load_topic_probabilities(path, topics, table)


def test_probability_csv_rejects_wrong_columns(tmp_path):
    topics = [TopicInfo(0, "a"), TopicInfo(1, "b")]
    path = tmp_path / "probs.csv"
    path.write_text("doc_id,utterance_index,a\nd0,0,0.5\n")
    with pytest.raises(ParseError):
        load_topic_probabilities(path, topics)


def test_probability_write_read_round_trip(tmp_path, rng):
    probs = make_probs(rng.random((8, 3)))
    path = tmp_path / "probs.csv"
    write_topic_probabilities(probs, path)
    loaded = load_topic_probabilities(path, probs.topics)
    assert loaded.keys == probs.keys
    assert np.array_equal(loaded.values, probs.values)
