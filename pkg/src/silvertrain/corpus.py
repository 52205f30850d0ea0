"""Datasets of labeled text samples: JSONL loading, validation, splitting, dedup.

A sample is a (id, text, optional Yes/No label) triple plus a provenance tag
recording how it entered the pipeline (original ingestion, one of the
augmentation techniques, or a self-training round). Datasets are immutable
value objects; every operation here returns new datasets and never mutates
its inputs.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .ioutil import atomic_write

logger = logging.getLogger(__name__)

POSITIVE = "Yes"
NEGATIVE = "No"
LABELS = (POSITIVE, NEGATIVE)

SPLIT_TRAIN = "train"
SPLIT_HOLDOUT = "holdout"
SPLIT_POOL = "pool"
SPLIT_TEST = "test"
SPLITS = (SPLIT_TRAIN, SPLIT_HOLDOUT, SPLIT_POOL, SPLIT_TEST)

# Splits whose samples must carry a gold label. The task's test split ships
# unlabeled, so it is validated like a pool.
LABELED_SPLITS = (SPLIT_TRAIN, SPLIT_HOLDOUT)

PROV_ORIGINAL = "original"
PROV_ANONYMIZED = "anonymized"
PROV_LOWERCASED = "lowercased"
PROV_UPPERCASED = "uppercased"
PROV_HOMOGLYPHED = "homoglyphed"


def silver_provenance(round_number: int) -> str:
    """Provenance tag for a pseudo-labeled sample added in a given round."""
    if round_number < 1:
        raise ValueError(f"silver round must be >= 1, got {round_number}")
    return f"silver:{round_number}"


def is_silver(provenance: str) -> bool:
    return provenance.startswith("silver:")


class CorpusError(Exception):
    """Base class for dataset ingestion and validation failures."""


class ParseError(CorpusError):
    """A JSONL line could not be parsed; carries the 1-based line number."""

    def __init__(self, path: str | Path, line_number: int, reason: str):
        self.path = str(path)
        self.line_number = line_number
        self.reason = reason
        super().__init__(f"{path}:{line_number}: {reason}")


class DuplicateIdError(CorpusError):
    """Two samples share an id within one dataset."""


class LabelDomainError(CorpusError):
    """A label value is outside the Yes/No domain."""


@dataclass(frozen=True)
class Sample:
    """One text item with an optional gold label and a provenance tag."""

    id: str
    text: str
    label: str | None = None
    provenance: str = PROV_ORIGINAL

    def __post_init__(self):
        if not self.id:
            raise CorpusError("sample id must be non-empty")
        if self.label is not None and self.label not in LABELS:
            raise LabelDomainError(
                f"sample {self.id!r}: label must be one of {LABELS}, got {self.label!r}"
            )


@dataclass(frozen=True)
class Dataset:
    """Ordered, immutable collection of samples with a split identity."""

    samples: tuple[Sample, ...]
    split: str = SPLIT_TRAIN

    def __post_init__(self):
        if self.split not in SPLITS:
            raise CorpusError(f"unknown split {self.split!r}, expected one of {SPLITS}")
        object.__setattr__(self, "samples", tuple(self.samples))
        seen: set[str] = set()
        for s in self.samples:
            if s.id in seen:
                raise DuplicateIdError(f"duplicate sample id {s.id!r}")
            seen.add(s.id)

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[Sample]:
        return iter(self.samples)

    def ids(self) -> list[str]:
        return [s.id for s in self.samples]

    def texts(self) -> list[str]:
        return [s.text for s in self.samples]

    def labels(self) -> list[str | None]:
        return [s.label for s in self.samples]

    def class_counts(self) -> dict[str, int]:
        counts = {POSITIVE: 0, NEGATIVE: 0}
        for s in self.samples:
            if s.label is not None:
                counts[s.label] += 1
        return counts

    def with_split(self, split: str) -> "Dataset":
        return Dataset(self.samples, split)


@dataclass
class ValidationReport:
    """Pure report on a dataset; producing it never mutates the dataset."""

    total: int
    length_violations: list[tuple[str, int]] = field(default_factory=list)
    label_violations: list[str] = field(default_factory=list)
    duplicate_texts: int = 0

    def ok(self) -> bool:
        return not self.length_violations and not self.label_violations


def load_jsonl(path: str | Path, split: str = SPLIT_TRAIN) -> Dataset:
    """Load a dataset from a UTF-8 JSONL file, preserving line order.

    Each line must be a JSON object with string fields ``id`` and ``text``
    and an optional ``label`` in {"Yes", "No"} (case-sensitive). Blank lines
    are ignored. All loaded samples get provenance "original".

    Raises:
        ParseError: malformed JSON or wrong field types, with line number.
        LabelDomainError: a label outside the Yes/No domain.
        DuplicateIdError: two lines share an id.
    """
    path = Path(path)
    samples: list[Sample] = []
    seen: set[str] = set()
    with path.open("r", encoding="utf-8") as fh:
        for line_number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_number, f"malformed JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ParseError(path, line_number, "line is not a JSON object")
            sample_id = obj.get("id")
            text = obj.get("text")
            if not isinstance(sample_id, str) or not sample_id:
                raise ParseError(path, line_number, "field 'id' must be a non-empty string")
            if not isinstance(text, str):
                raise ParseError(path, line_number, "field 'text' must be a string")
            label = obj.get("label")
            if label is not None and label not in LABELS:
                raise LabelDomainError(
                    f"{path}:{line_number}: label must be one of {LABELS}, got {label!r}"
                )
            if sample_id in seen:
                raise DuplicateIdError(f"{path}:{line_number}: duplicate id {sample_id!r}")
            seen.add(sample_id)
            samples.append(Sample(id=sample_id, text=text, label=label))
    return Dataset(tuple(samples), split)


def write_jsonl(dataset: Dataset, path: str | Path) -> None:
    """Write a dataset as JSONL with fields id, text and (when present) label.

    Written atomically (write-then-rename).
    """
    with atomic_write(path) as fh:
        for s in dataset:
            obj: dict[str, str] = {"id": s.id, "text": s.text}
            if s.label is not None:
                obj["label"] = s.label
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def validate(dataset: Dataset, min_chars: int = 160, max_chars: int = 1000) -> ValidationReport:
    """Report length violations, missing labels, and duplicate texts.

    Text length is measured in Unicode scalar values; the bounds are
    inclusive, so a text of exactly ``min_chars`` or ``max_chars`` passes.
    Missing labels are reported only for splits that require them
    (train and holdout).
    """
    report = ValidationReport(total=len(dataset))
    labels_required = dataset.split in LABELED_SPLITS
    seen_texts: set[str] = set()
    for s in dataset:
        n = len(s.text)
        if n < min_chars or n > max_chars:
            report.length_violations.append((s.id, n))
        if labels_required and s.label is None:
            report.label_violations.append(s.id)
        if s.text in seen_texts:
            report.duplicate_texts += 1
        else:
            seen_texts.add(s.text)
    return report


def stratified_holdout(
    dataset: Dataset, per_class: int, seed: int
) -> tuple[Dataset, Dataset]:
    """Split off a class-balanced holdout by seeded sampling without replacement.

    The holdout receives exactly ``per_class`` samples of each class, drawn
    uniformly; the remainder stays in the train split. Both outputs preserve
    the input ordering, and the split is deterministic for a fixed seed.

    Raises:
        CorpusError: dataset is not a train split, a sample is unlabeled,
            or a class has fewer than ``per_class`` samples.
    """
    if dataset.split != SPLIT_TRAIN:
        raise CorpusError(f"stratified_holdout expects a train split, got {dataset.split!r}")
    if per_class < 0:
        raise CorpusError(f"per_class must be >= 0, got {per_class}")
    by_class: dict[str, list[int]] = {POSITIVE: [], NEGATIVE: []}
    for i, s in enumerate(dataset):
        if s.label is None:
            raise CorpusError(f"sample {s.id!r} is unlabeled; holdout split needs labels")
        by_class[s.label].append(i)
    for label in LABELS:
        if len(by_class[label]) < per_class:
            raise CorpusError(
                f"class {label!r} has only {len(by_class[label])} samples, "
                f"need at least {per_class}"
            )
    rng = np.random.default_rng(seed)
    holdout_indices: set[int] = set()
    for label in LABELS:
        indices = by_class[label]
        chosen = rng.choice(len(indices), size=per_class, replace=False)
        holdout_indices.update(indices[j] for j in chosen)
    train_samples = tuple(s for i, s in enumerate(dataset) if i not in holdout_indices)
    holdout_samples = tuple(s for i, s in enumerate(dataset) if i in holdout_indices)
    return Dataset(train_samples, SPLIT_TRAIN), Dataset(holdout_samples, SPLIT_HOLDOUT)


def dedup(dataset: Dataset) -> tuple[Dataset, int]:
    """Remove samples with byte-identical text, keeping the first occurrence.

    Copies that agree on the label collapse onto the earliest one. If
    byte-identical texts carry conflicting labels, every copy is removed
    (label noise should not train either class); each conflict is logged.
    Survivor order is preserved. Returns the deduplicated dataset and the
    number of removed samples.
    """
    label_sets: dict[str, set[str | None]] = {}
    for s in dataset:
        label_sets.setdefault(s.text, set()).add(s.label)
    conflicted = {text for text, labels in label_sets.items() if len(labels) > 1}
    for text in conflicted:
        ids = [s.id for s in dataset if s.text == text]
        logger.warning(
            "dedup: conflicting labels for identical text, removing all copies: ids=%s", ids
        )
    kept: list[Sample] = []
    seen: set[str] = set()
    removed = 0
    for s in dataset:
        if s.text in conflicted or s.text in seen:
            removed += 1
            continue
        seen.add(s.text)
        kept.append(s)
    return Dataset(tuple(kept), dataset.split), removed
