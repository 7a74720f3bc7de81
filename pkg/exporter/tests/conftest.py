import pytest

from exporter_corpora import two_vocabulary_corpus, write_table


@pytest.fixture
def toy_table(tmp_path):
    path = tmp_path / "utterances.jsonl"
    write_table(path, two_vocabulary_corpus())
    return path
