"""Confusion-matrix metrics, macro-averaged F1, threshold sweeping, and
prediction-file emission.

Macro F1 is the official metric of the task this toolkit targets: the
unweighted mean of the per-class F1 scores, insensitive to class imbalance.
All metric functions are pure; zero denominators follow the common scorer
convention (precision, recall and F1 default to 0).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import LABELS, NEGATIVE, POSITIVE, Dataset
from .ioutil import atomic_write
from .model import DecisionRule, decide


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with Yes as the positive class."""

    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass
class EvalReport:
    """Per-class precision/recall/F1, macro F1 and the decision threshold used."""

    matrix: ConfusionMatrix
    precision: dict[str, float]
    recall: dict[str, float]
    f1: dict[str, float]
    macro_f1: float
    threshold: float | None
    single_class_gold: bool = False

    def to_dict(self) -> dict:
        return {
            "confusion": {
                "tp": self.matrix.tp,
                "fp": self.matrix.fp,
                "fn": self.matrix.fn,
                "tn": self.matrix.tn,
            },
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "macro_f1": self.macro_f1,
            "threshold": self.threshold,
            "single_class_gold": self.single_class_gold,
        }


def confusion(golds: list[str], preds: list[str]) -> ConfusionMatrix:
    """Count agreement between gold and predicted Yes/No labels."""
    if len(golds) != len(preds):
        raise ValueError(f"length mismatch: {len(golds)} golds vs {len(preds)} preds")
    tp = fp = fn = tn = 0
    for gold, pred in zip(golds, preds):
        if gold not in LABELS or pred not in LABELS:
            raise ValueError(f"labels must be in {LABELS}, got gold={gold!r} pred={pred!r}")
        if gold == POSITIVE:
            if pred == POSITIVE:
                tp += 1
            else:
                fn += 1
        else:
            if pred == POSITIVE:
                fp += 1
            else:
                tn += 1
    return ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def macro_f1(cm: ConfusionMatrix) -> float:
    """Unweighted mean of the Yes-class and No-class F1 scores.

    For the No class the matrix roles swap: its true positives are tn, its
    false positives are fn (gold Yes predicted No) and its false negatives
    are fp. Degenerate single-class matrices are computed under the
    zero-division convention rather than rejected, e.g. single-class gold
    with perfect predictions yields (1 + 0) / 2 = 0.5.
    """
    _, _, f1_pos = _prf(cm.tp, cm.fp, cm.fn)
    _, _, f1_neg = _prf(cm.tn, cm.fn, cm.fp)
    return (f1_pos + f1_neg) / 2.0


def report(cm: ConfusionMatrix, threshold: float | None = 0.5) -> EvalReport:
    """Full per-class report for a confusion matrix."""
    p_pos, r_pos, f1_pos = _prf(cm.tp, cm.fp, cm.fn)
    p_neg, r_neg, f1_neg = _prf(cm.tn, cm.fn, cm.fp)
    return EvalReport(
        matrix=cm,
        precision={POSITIVE: p_pos, NEGATIVE: p_neg},
        recall={POSITIVE: r_pos, NEGATIVE: r_neg},
        f1={POSITIVE: f1_pos, NEGATIVE: f1_neg},
        macro_f1=(f1_pos + f1_neg) / 2.0,
        threshold=threshold,
        single_class_gold=(cm.tp + cm.fn == 0) or (cm.tn + cm.fp == 0),
    )


def evaluate_probs(golds: list[str], probs: list[float], rule: DecisionRule) -> EvalReport:
    """Apply the decision rule to probabilities and score against golds."""
    preds = [decide(p, rule) for p in probs]
    return report(confusion(golds, preds), threshold=rule.threshold)


def evaluate_model(model, dataset: Dataset, rule: DecisionRule = DecisionRule()) -> EvalReport:
    """Predict on a labeled dataset and score with the given decision rule."""
    golds = _require_labels(dataset)
    probs = predict_probs(model, dataset.texts())
    return evaluate_probs(golds, list(probs), rule)


def predict_probs(model, texts: list[str]) -> np.ndarray:
    """Positive-class probabilities for a list of texts, batched when the
    backend supports it."""
    batch = getattr(model, "predict_proba_batch", None)
    if batch is not None:
        return np.asarray(batch(texts), dtype=np.float64)
    return np.array([model.predict_proba(t) for t in texts], dtype=np.float64)


def threshold_sweep(
    model, valid: Dataset, grid: list[float]
) -> tuple[float, list[EvalReport]]:
    """Score the model at each decision threshold in the grid.

    Returns the threshold maximizing validation macro F1 (smallest on ties)
    and the full per-point reports for audit. Probabilities are computed
    once and reused across grid points.
    """
    if not grid:
        raise ValueError("threshold grid must be non-empty")
    for t in grid:
        if not 0.0 < t < 1.0:
            raise ValueError(f"grid thresholds must lie strictly inside (0, 1), got {t}")
    golds = _require_labels(valid)
    probs = list(predict_probs(model, valid.texts()))
    reports = [evaluate_probs(golds, probs, DecisionRule(t)) for t in grid]
    best_threshold = grid[0]
    best_f1 = reports[0].macro_f1
    for t, rep in zip(grid[1:], reports[1:]):
        if rep.macro_f1 > best_f1 or (rep.macro_f1 == best_f1 and t < best_threshold):
            best_threshold = t
            best_f1 = rep.macro_f1
    return best_threshold, reports


def write_predictions(ids: list[str], labels: list[str], path: str | Path) -> None:
    """Write {"id", "label"} JSONL, order-preserving, UTF-8, trailing newline.

    The file is written to a temporary sibling and renamed into place so
    failures never leave a truncated output.
    """
    if len(ids) != len(labels):
        raise ValueError(f"length mismatch: {len(ids)} ids vs {len(labels)} labels")
    for label in labels:
        if label not in LABELS:
            raise ValueError(f"labels must be in {LABELS}, got {label!r}")
    with atomic_write(path) as fh:
        for sample_id, label in zip(ids, labels):
            fh.write(json.dumps({"id": sample_id, "label": label}, ensure_ascii=False) + "\n")


def read_predictions(path: str | Path) -> list[tuple[str, str]]:
    """Read back a predictions file as (id, label) pairs in file order."""
    pairs: list[tuple[str, str]] = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            pairs.append((obj["id"], obj["label"]))
    return pairs


def render_variant_table(rows: list[tuple[str, float]]) -> str:
    """Human-readable variant comparison: name and macro F1 at 2 decimals."""
    name_width = max([len("Detector")] + [len(name) for name, _ in rows])
    lines = [f"{'Detector':>{name_width}} | Macro F1", f"{'-' * name_width}-+---------"]
    for name, value in rows:
        lines.append(f"{name:>{name_width}} | {value:.2f}")
    return "\n".join(lines)


def _require_labels(dataset: Dataset) -> list[str]:
    golds: list[str] = []
    for s in dataset:
        if s.label is None:
            raise ValueError(f"sample {s.id!r} is unlabeled; evaluation needs gold labels")
        golds.append(s.label)
    return golds
