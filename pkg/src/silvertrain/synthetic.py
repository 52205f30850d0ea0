"""Synthetic separable corpora for demos and end-to-end checks.

Texts are built from two disjoint class vocabularies plus a small shared
noise vocabulary, so a character-level model can separate the classes
while the generator keeps the true label of every pool sample as a hidden
oracle.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import NEGATIVE, POSITIVE, SPLIT_POOL, SPLIT_TRAIN, Dataset, Sample


@dataclass
class SyntheticCorpus:
    labeled: Dataset
    pool: Dataset
    hidden_pool_labels: dict[str, str]


def make_separable_corpus(
    n_labeled: int = 800,
    n_pool: int = 2000,
    noise_fraction: float = 0.05,
    tokens_per_text: int = 12,
    vocab_per_class: int = 150,
    shared_vocab: int = 40,
    seed: int = 0,
) -> SyntheticCorpus:
    """Generate a balanced labeled set and an unlabeled pool.

    Each text draws ``tokens_per_text`` tokens from its class vocabulary;
    every token is independently replaced by a shared-noise token with
    probability ``noise_fraction``. Class vocabularies are disjoint down to
    the character level ("zor###" vs "mek###"), so the corpus is linearly
    separable for character n-gram features. Deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    vocab = {
        POSITIVE: [f"zor{i:03d}" for i in range(vocab_per_class)],
        NEGATIVE: [f"mek{i:03d}" for i in range(vocab_per_class)],
    }
    noise = [f"qua{i:03d}" for i in range(shared_vocab)]

    def make_text(label: str) -> str:
        words = []
        for _ in range(tokens_per_text):
            if rng.random() < noise_fraction:
                words.append(noise[rng.integers(len(noise))])
            else:
                words.append(vocab[label][rng.integers(len(vocab[label]))])
        return " ".join(words)

    labeled_samples = []
    for i in range(n_labeled):
        label = POSITIVE if i % 2 == 0 else NEGATIVE
        labeled_samples.append(Sample(id=f"gold-{i:05d}", text=make_text(label), label=label))

    pool_samples = []
    hidden: dict[str, str] = {}
    for i in range(n_pool):
        label = POSITIVE if i % 2 == 0 else NEGATIVE
        sample_id = f"pool-{i:05d}"
        pool_samples.append(Sample(id=sample_id, text=make_text(label)))
        hidden[sample_id] = label

    return SyntheticCorpus(
        labeled=Dataset(tuple(labeled_samples), SPLIT_TRAIN),
        pool=Dataset(tuple(pool_samples), SPLIT_POOL),
        hidden_pool_labels=hidden,
    )
