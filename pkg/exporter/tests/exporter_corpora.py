"""Synthetic corpora for exporter tests."""
import json

import numpy as np


def write_table(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def two_vocabulary_corpus():
    """20 utterances over two disjoint vocabularies, 10 each."""
    records = []
    fruit = "apple banana cherry fruit orchard sweet harvest ripe"
    engine = "engine piston gearbox torque diesel motor machine valve"
    for i in range(10):
        records.append(
            {"doc_id": f"fruit{i}", "utterance_index": 0,
             "conversation_id": f"fruit{i}", "text": f"{fruit} variant{i % 3}",
             "group": None}
        )
    for i in range(10):
        records.append(
            {"doc_id": f"engine{i}", "utterance_index": 0,
             "conversation_id": f"engine{i}", "text": f"{engine} variant{i % 3}",
             "group": None}
        )
    return records


def family_corpus(n_families=3, n_per_family=None, total=1000, seed=5):
    """Synthetic corpus of disjoint vocabulary families, default 1000 rows."""
    rng = np.random.default_rng(seed)
    if n_per_family is None:
        n_per_family = total // n_families
    records = []
    k = 0
    for f in range(n_families):
        vocab = [f"family{f}term{w}" for w in range(40)]
        for i in range(n_per_family):
            words = rng.choice(vocab, size=8, replace=True)
            records.append(
                {"doc_id": f"doc{k}", "utterance_index": 0,
                 "conversation_id": f"doc{k}", "text": " ".join(words),
                 "group": "HIGH" if k % 2 == 0 else "LOW"}
            )
            k += 1
    while len(records) < total:
        records.append(
            {"doc_id": f"doc{k}", "utterance_index": 0,
             "conversation_id": f"doc{k}",
             "text": "family0term0 family0term1 family0term2", "group": None}
        )
        k += 1
    return records[:total]


def hierarchical_corpus(seed=99):
    """Two superfamilies of three subfamilies each; shared words dominate."""
    rng = np.random.default_rng(seed)
    records = []
    k = 0
    for sup in range(2):
        shared = [f"sup{sup}common{w}" for w in range(20)]
        for sub in range(3):
            vocab = [f"sup{sup}sub{sub}word{w}" for w in range(20)]
            for _ in range(30):
                words = list(rng.choice(vocab, size=5)) + list(
                    rng.choice(shared, size=4)
                )
                records.append(
                    {"doc_id": f"d{k}", "utterance_index": 0,
                     "conversation_id": f"d{k}", "text": " ".join(words),
                     "group": None}
                )
                k += 1
    return records
