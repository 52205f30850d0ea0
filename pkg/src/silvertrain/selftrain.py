"""Confidence-filtered self-training.

A teacher trained on gold labels predicts positive-class probabilities for
an unlabeled pool; only near-certain predictions (p >= 0.99 positive,
p <= 0.01 negative by default) become silver labels, which are merged into
the train set for retraining from scratch. The loop can repeat, never
re-offering pool samples that were already silver-labeled, and logs exactly
what was added and removed each round.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .corpus import NEGATIVE, POSITIVE, Dataset, Sample, dedup, silver_provenance
from .evaluation import predict_probs
from .ioutil import atomic_write
from .model import ProbabilisticClassifier, TrainConfig, TrainingLog

logger = logging.getLogger(__name__)


@dataclass
class SelfTrainConfig:
    """Confidence cutoffs and round count for the loop."""

    pos_threshold: float = 0.99
    neg_threshold: float = 0.01
    rounds: int = 1

    def __post_init__(self):
        if not 0.0 < self.neg_threshold < self.pos_threshold < 1.0:
            raise ValueError(
                "thresholds must satisfy 0 < neg_threshold < pos_threshold < 1, "
                f"got neg={self.neg_threshold} pos={self.pos_threshold}"
            )
        if self.rounds < 1:
            raise ValueError(f"rounds must be >= 1, got {self.rounds}")


@dataclass(frozen=True)
class SilverRecord:
    """A pseudo-labeled pool item and the confidence that admitted it."""

    id: str
    p: float
    assigned: str
    round: int


@dataclass
class RoundRecord:
    """Exact sample accounting for one self-training round."""

    round: int
    pool_offered: int
    silver_positive: int
    silver_negative: int
    train_before: int
    train_after_merge: int
    dedup_removed: int
    best_val_macro_f1: float


@dataclass
class SelfTrainLog:
    """Provenance log of the whole loop."""

    teacher_log: TrainingLog | None = None
    rounds: list[RoundRecord] = field(default_factory=list)
    silver: list[SilverRecord] = field(default_factory=list)


def pseudo_label(model: ProbabilisticClassifier, pool: Dataset) -> list[tuple[str, float]]:
    """Predict the positive-class probability for every pool sample.

    Order-preserving, one record per sample; deterministic for a frozen
    model. Raises if the model has no trained state.
    """
    probs = predict_probs(model, pool.texts())
    return [(s.id, float(p)) for s, p in zip(pool, probs)]


def filter_confident(
    preds: list[tuple[str, float]], cfg: SelfTrainConfig, round_number: int
) -> list[SilverRecord]:
    """Keep only near-certain predictions as silver labels.

    p >= pos_threshold assigns Yes, p <= neg_threshold assigns No (both
    inclusive); everything in between is dropped. Input order is preserved.
    """
    records: list[SilverRecord] = []
    for sample_id, p in preds:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability for {sample_id!r} outside [0, 1]: {p}")
        if p >= cfg.pos_threshold:
            records.append(SilverRecord(sample_id, p, POSITIVE, round_number))
        elif p <= cfg.neg_threshold:
            records.append(SilverRecord(sample_id, p, NEGATIVE, round_number))
    return records


def merge(train: Dataset, silver: list[SilverRecord], pool: Dataset) -> Dataset:
    """Append silver-labeled pool samples to the train set and de-duplicate.

    Every silver id must name a pool sample and must not collide with a
    train id, so silver labels can never displace gold ones. Appended
    samples carry the assigned label and a silver(round) provenance. The
    union passes through corpus.dedup, whose conflict rule removes both
    copies when a silver text contradicts a gold text's label.
    """
    pool_by_id = {s.id: s for s in pool}
    train_ids = set(train.ids())
    appended: list[Sample] = []
    for record in silver:
        if record.id not in pool_by_id:
            raise ValueError(f"silver id {record.id!r} not found in pool")
        if record.id in train_ids:
            raise ValueError(f"silver id {record.id!r} collides with a train id")
        source = pool_by_id[record.id]
        appended.append(
            Sample(
                id=record.id,
                text=source.text,
                label=record.assigned,
                provenance=silver_provenance(record.round),
            )
        )
    combined = Dataset(tuple(train.samples) + tuple(appended), train.split)
    merged, removed = dedup(combined)
    if removed:
        logger.info("merge: dedup removed %d samples", removed)
    return merged


def self_train_loop(
    labeled: Dataset,
    valid: Dataset,
    pool: Dataset,
    tcfg: TrainConfig,
    scfg: SelfTrainConfig,
    backend_factory: Callable[[], ProbabilisticClassifier],
) -> tuple[ProbabilisticClassifier, SelfTrainLog]:
    """Run teacher training plus ``scfg.rounds`` of pseudo-label/retrain.

    The teacher trains purely on the gold train set. Each round freezes the
    current model, pseudo-labels the remaining pool, filters at the
    confidence cutoffs, merges, and retrains a fresh model from scratch on
    the merged set. Pool samples silver-labeled in an earlier round are not
    re-offered. Returns the final model and the provenance log.
    """
    overlap = set(labeled.ids()) & set(pool.ids())
    if overlap:
        raise ValueError(f"pool ids must be disjoint from train ids, overlap: {sorted(overlap)[:5]}")

    model = backend_factory()
    log = SelfTrainLog()
    log.teacher_log = model.train(labeled, valid, tcfg)

    current_train = labeled
    remaining_pool = pool
    for round_number in range(1, scfg.rounds + 1):
        preds = pseudo_label(model, remaining_pool)
        silver = filter_confident(preds, scfg, round_number)
        log.silver.extend(silver)

        train_before = len(current_train)
        merged = merge(current_train, silver, remaining_pool)
        dedup_removed = train_before + len(silver) - len(merged)

        silver_ids = {r.id for r in silver}
        remaining_pool = Dataset(
            tuple(s for s in remaining_pool if s.id not in silver_ids), remaining_pool.split
        )

        model = backend_factory()
        round_log = model.train(merged, valid, tcfg)
        log.rounds.append(
            RoundRecord(
                round=round_number,
                pool_offered=len(preds),
                silver_positive=sum(1 for r in silver if r.assigned == POSITIVE),
                silver_negative=sum(1 for r in silver if r.assigned == NEGATIVE),
                train_before=train_before,
                train_after_merge=len(merged),
                dedup_removed=dedup_removed,
                best_val_macro_f1=round_log.best_macro_f1,
            )
        )
        current_train = merged
    return model, log


def write_silver_jsonl(records: list[SilverRecord], path: str | Path) -> None:
    """Export silver records for audit: {"id", "p", "assigned", "round"} lines."""
    with atomic_write(path) as fh:
        for r in records:
            fh.write(
                json.dumps(
                    {"id": r.id, "p": r.p, "assigned": r.assigned, "round": r.round},
                    ensure_ascii=False,
                )
                + "\n"
            )
