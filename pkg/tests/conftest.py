import pytest

from silvertrain.corpus import stratified_holdout, write_jsonl
from silvertrain.synthetic import make_separable_corpus


@pytest.fixture
def corpus_files(tmp_path):
    """Small separable corpus on disk: gold, train, holdout, pool JSONL."""
    corpus = make_separable_corpus(
        n_labeled=200, n_pool=60, tokens_per_text=8, vocab_per_class=40, seed=17
    )
    train, holdout = stratified_holdout(corpus.labeled, 20, seed=3)
    paths = {
        "gold": tmp_path / "gold.jsonl",
        "train": tmp_path / "train.jsonl",
        "holdout": tmp_path / "holdout.jsonl",
        "pool": tmp_path / "pool.jsonl",
    }
    write_jsonl(corpus.labeled, paths["gold"])
    write_jsonl(train, paths["train"])
    write_jsonl(holdout, paths["holdout"])
    write_jsonl(corpus.pool, paths["pool"])
    paths["hidden"] = corpus.hidden_pool_labels
    paths["dir"] = tmp_path
    return paths
